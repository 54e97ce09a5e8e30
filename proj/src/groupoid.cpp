#include "qteich/groupoid.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qteich/error.hpp"
#include "qteich/operators.hpp"

namespace qteich {

namespace {

struct Slot {
    int tri;
    int slot;
    bool operator<(const Slot& o) const { return tri != o.tri ? tri < o.tri : slot < o.slot; }
    bool operator==(const Slot& o) const { return tri == o.tri && slot == o.slot; }
};

void check_index(const DecoratedTriangulation& t, int i) {
    if (i < 1 || i > t.size())
        throw Error(ErrorKind::IndexOutOfRange, "triangle " + std::to_string(i) + " of " + std::to_string(t.size()));
}

Slot slot_of(const DecoratedTriangulation& t, SideRef r) {
    return {r.tri, (r.side - t.triangles[r.tri].marked_corner + 3) % 3};
}

// Rewires the two triangles of a flip. `map` sends the four outer slots to their new places,
// `diag` names the slots that become the new common edge. Marked corners do not move.
DecoratedTriangulation rewire(const DecoratedTriangulation& t, int ti, int tj, const std::map<Slot, Slot>& map,
                              std::pair<Slot, Slot> diag) {
    auto side_of = [&](Slot s) { return SideRef{s.tri, t.intrinsic(s.tri, s.slot)}; };
    auto moved = [&](Slot s) {
        auto it = map.find(s);
        return it == map.end() ? s : it->second;
    };
    DecoratedTriangulation out = t;
    auto old_diag_name = t.triangles[diag.first.tri].names[t.intrinsic(diag.first.tri, diag.first.slot)];
    std::map<Slot, std::string> moved_names;
    for (auto [from, to] : map) moved_names[to] = t.triangles[from.tri].names[t.intrinsic(from.tri, from.slot)];
    for (int k = 0; k < 3; ++k) {
        out.triangles[ti].glue[k] = SideRef{};
        out.triangles[tj].glue[k] = SideRef{};
    }
    for (auto [from, to] : map) {
        SideRef p = t.triangles[from.tri].glue[t.intrinsic(from.tri, from.slot)];
        SideRef here = side_of(to);
        out.triangles[here.tri].names[here.side] = moved_names[to];
        if (p.boundary()) continue;
        Slot q = slot_of(t, p);
        SideRef there = side_of(moved(q));
        out.triangles[here.tri].glue[here.side] = there;
        out.triangles[there.tri].glue[there.side] = here;
    }
    SideRef a = side_of(diag.first), b = side_of(diag.second);
    out.triangles[a.tri].glue[a.side] = b;
    out.triangles[b.tri].glue[b.side] = a;
    out.triangles[a.tri].names[a.side] = old_diag_name;
    out.triangles[b.tri].names[b.side] = old_diag_name;
    return out;
}

std::vector<int> inverse_perm(const std::vector<int>& s) {
    std::vector<int> inv(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) inv[s[k] - 1] = static_cast<int>(k) + 1;
    return inv;
}

void check_perm(const std::vector<int>& s, int n) {
    if (static_cast<int>(s.size()) != n) throw Error(ErrorKind::IndexOutOfRange, "permutation size");
    std::vector<bool> seen(n, false);
    for (int v : s) {
        if (v < 1 || v > n || seen[v - 1]) throw Error(ErrorKind::InvalidWord, "not a permutation");
        seen[v - 1] = true;
    }
}

int find_root(std::vector<int>& parent, int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
}

}  // namespace

SideRef DecoratedTriangulation::partner_of_slot(int tri, int slot) const {
    return triangles.at(tri).glue[intrinsic(tri, slot)];
}

bool DecoratedTriangulation::glued(int ti, int si, int tj, int sj) const {
    SideRef p = partner_of_slot(ti, si);
    return p.tri == tj && p.side == intrinsic(tj, sj);
}

void DecoratedTriangulation::validate() const {
    if (triangles.empty()) throw Error(ErrorKind::InvalidParameter, "empty triangulation");
    for (int t = 0; t < size(); ++t) {
        const auto& tr = triangles[t];
        if (tr.marked_corner < 0 || tr.marked_corner > 2) throw Error(ErrorKind::InvalidParameter, "marked corner");
        for (int k = 0; k < 3; ++k) {
            SideRef p = tr.glue[k];
            if (p.boundary()) continue;
            if (p.tri >= size() || p.side < 0 || p.side > 2)
                throw Error(ErrorKind::IndexOutOfRange, "gluing target");
            if (p.tri == t && p.side == k) throw Error(ErrorKind::InvalidParameter, "side glued to itself");
            SideRef back = triangles[p.tri].glue[p.side];
            if (back.tri != t || back.side != k) throw Error(ErrorKind::InvalidParameter, "gluing not involutive");
        }
    }
}

int DecoratedTriangulation::vertex_count() const {
    std::vector<int> parent(3 * size());
    std::iota(parent.begin(), parent.end(), 0);
    auto unite = [&](int a, int b) { parent[find_root(parent, a)] = find_root(parent, b); };
    for (int t = 0; t < size(); ++t)
        for (int k = 0; k < 3; ++k) {
            SideRef p = triangles[t].glue[k];
            if (p.boundary()) continue;
            unite(3 * t + k, 3 * p.tri + (p.side + 1) % 3);
            unite(3 * t + (k + 1) % 3, 3 * p.tri + p.side);
        }
    int roots = 0;
    for (int c = 0; c < 3 * size(); ++c) roots += find_root(parent, c) == c;
    return roots;
}

int DecoratedTriangulation::boundary_count() const {
    int b = 0;
    for (const auto& tr : triangles)
        for (const auto& g : tr.glue) b += g.boundary();
    return b;
}

int DecoratedTriangulation::edge_count() const { return (3 * size() + boundary_count()) / 2; }

int DecoratedTriangulation::euler_characteristic() const { return vertex_count() - edge_count() + size(); }

std::vector<std::array<std::pair<int, int>, 3>> DecoratedTriangulation::relative() const {
    std::vector<std::array<std::pair<int, int>, 3>> r(triangles.size());
    for (int t = 0; t < size(); ++t)
        for (int s = 0; s < 3; ++s) {
            SideRef p = partner_of_slot(t, s);
            if (p.boundary())
                r[t][s] = {-1, -1};
            else
                r[t][s] = {p.tri, (p.side - triangles[p.tri].marked_corner + 3) % 3};
        }
    return r;
}

Move Move::inverse() const {
    switch (kind) {
        case Rho: return rho_inv(i);
        case RhoInv: return rho(i);
        case Flip: return flip_inv(i, j);
        case FlipInv: return flip(i, j);
        case Perm: return perm(inverse_perm(sigma));
    }
    return *this;
}

DecoratedTriangulation apply_move(const DecoratedTriangulation& t, const Move& m) {
    switch (m.kind) {
        case Move::Rho:
        case Move::RhoInv: {
            check_index(t, m.i);
            DecoratedTriangulation out = t;
            auto& mc = out.triangles[m.i - 1].marked_corner;
            mc = (mc + (m.kind == Move::Rho ? 1 : 2)) % 3;
            return out;
        }
        case Move::Flip:
        case Move::FlipInv: {
            check_index(t, m.i);
            check_index(t, m.j);
            if (m.i == m.j) throw Error(ErrorKind::FlipInapplicable, "flip needs two distinct triangles");
            int ti = m.i - 1, tj = m.j - 1;
            if (m.kind == Move::Flip) {
                if (!t.glued(ti, 1, tj, 2))
                    throw Error(ErrorKind::FlipInapplicable, "w" + std::to_string(m.i) + std::to_string(m.j));
                std::map<Slot, Slot> map{{{ti, 0}, {tj, 2}}, {{ti, 2}, {ti, 2}}, {{tj, 0}, {tj, 0}}, {{tj, 1}, {ti, 1}}};
                return rewire(t, ti, tj, map, {{ti, 0}, {tj, 1}});
            }
            if (!t.glued(ti, 0, tj, 1))
                throw Error(ErrorKind::FlipInapplicable, "W" + std::to_string(m.i) + std::to_string(m.j));
            std::map<Slot, Slot> map{{{tj, 2}, {ti, 0}}, {{ti, 2}, {ti, 2}}, {{tj, 0}, {tj, 0}}, {{ti, 1}, {tj, 1}}};
            return rewire(t, ti, tj, map, {{ti, 1}, {tj, 2}});
        }
        case Move::Perm: {
            check_perm(m.sigma, t.size());
            auto inv = inverse_perm(m.sigma);
            DecoratedTriangulation out;
            out.triangles.resize(t.triangles.size());
            for (int k = 0; k < t.size(); ++k) {
                out.triangles[k] = t.triangles[m.sigma[k] - 1];
                for (auto& g : out.triangles[k].glue)
                    if (!g.boundary()) g.tri = inv[g.tri] - 1;
            }
            return out;
        }
    }
    return t;
}

DecoratedTriangulation apply_word(const DecoratedTriangulation& t, const MoveWord& w) {
    DecoratedTriangulation cur = t;
    for (std::size_t s = 0; s < w.size(); ++s) {
        try {
            cur = apply_move(cur, w[s]);
        } catch (const Error& e) {
            throw Error(e.kind(), "step " + std::to_string(s) + " (" + format_move(w[s]) + "): " + e.what());
        }
    }
    return cur;
}

// ---- Word grammar ----------------------------------------------------------------------------

std::vector<int> parse_cycles(const std::string& text, int n) {
    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 1);
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] != '(') throw Error(ErrorKind::InvalidWord, "cycle notation: " + text);
        auto close = text.find(')', pos);
        if (close == std::string::npos) throw Error(ErrorKind::InvalidWord, "unclosed cycle: " + text);
        std::string body = text.substr(pos + 1, close - pos - 1);
        std::vector<int> cyc;
        if (body.find(',') != std::string::npos) {
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) cyc.push_back(std::stoi(item));
        } else {
            for (char c : body) {
                if (!std::isdigit(static_cast<unsigned char>(c))) throw Error(ErrorKind::InvalidWord, "cycle: " + body);
                cyc.push_back(c - '0');
            }
        }
        for (int v : cyc)
            if (v < 1 || v > n) throw Error(ErrorKind::InvalidWord, "cycle entry out of range: " + body);
        // Applied after the cycles already read: sigma <- c o sigma.
        std::vector<int> c(n);
        std::iota(c.begin(), c.end(), 1);
        for (std::size_t k = 0; k < cyc.size(); ++k) c[cyc[k] - 1] = cyc[(k + 1) % cyc.size()];
        for (auto& v : sigma) v = c[v - 1];
        pos = close + 1;
    }
    check_perm(sigma, n);
    return sigma;
}

MoveWord parse_word(const std::string& text, int n) {
    MoveWord w;
    std::stringstream ss(text);
    std::string tok;
    auto number = [&](const std::string& s) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw Error(ErrorKind::InvalidWord, "bad index in token: " + tok);
        int v = std::stoi(s);
        if (v < 1 || v > n) throw Error(ErrorKind::InvalidWord, "index out of range in token: " + tok);
        return v;
    };
    while (ss >> tok) {
        char head = tok[0];
        std::string rest = tok.substr(1);
        if (head == 'r' || head == 'R') {
            int i = number(rest);
            w.push_back(head == 'r' ? Move::rho(i) : Move::rho_inv(i));
        } else if (head == 'w' || head == 'W') {
            int i, j;
            auto comma = rest.find(',');
            if (comma != std::string::npos) {
                i = number(rest.substr(0, comma));
                j = number(rest.substr(comma + 1));
            } else {
                if (rest.size() != 2) throw Error(ErrorKind::InvalidWord, "flip token needs two indices: " + tok);
                i = number(rest.substr(0, 1));
                j = number(rest.substr(1, 1));
            }
            if (i == j) throw Error(ErrorKind::InvalidWord, "flip on one triangle: " + tok);
            w.push_back(head == 'w' ? Move::flip(i, j) : Move::flip_inv(i, j));
        } else if (head == 'p') {
            w.push_back(Move::perm(parse_cycles(rest, n)));
        } else {
            throw Error(ErrorKind::InvalidWord, "unknown token: " + tok);
        }
    }
    return w;
}

std::string format_move(const Move& m) {
    bool wide = m.i > 9 || m.j > 9;
    auto pair = [&](int i, int j) { return wide ? std::to_string(i) + "," + std::to_string(j) : std::to_string(i) + std::to_string(j); };
    switch (m.kind) {
        case Move::Rho: return "r" + std::to_string(m.i);
        case Move::RhoInv: return "R" + std::to_string(m.i);
        case Move::Flip: return "w" + pair(m.i, m.j);
        case Move::FlipInv: return "W" + pair(m.i, m.j);
        case Move::Perm: {
            int n = static_cast<int>(m.sigma.size());
            bool big = n > 9;
            std::vector<bool> seen(n, false);
            std::string s = "p";
            for (int a = 1; a <= n; ++a) {
                if (seen[a - 1] || m.sigma[a - 1] == a) continue;
                s += "(";
                for (int v = a, first = 1; !seen[v - 1]; v = m.sigma[v - 1], first = 0) {
                    seen[v - 1] = true;
                    if (big && !first) s += ",";
                    s += std::to_string(v);
                }
                s += ")";
            }
            return s == "p" ? "p()" : s;
        }
    }
    return "?";
}

std::string format_word(const MoveWord& w) {
    std::string s;
    for (const auto& m : w) s += (s.empty() ? "" : " ") + format_move(m);
    return s;
}

// ---- Fixtures --------------------------------------------------------------------------------

namespace {

// Triangles given as side names in counterclockwise order starting at the marked corner; sides
// with equal names are glued, names starting with '~' are boundary.
DecoratedTriangulation from_names(const std::vector<std::array<std::string, 3>>& tris) {
    DecoratedTriangulation t;
    std::map<std::string, std::vector<SideRef>> seen;
    for (int k = 0; k < static_cast<int>(tris.size()); ++k) {
        Triangle tr;
        tr.marked_corner = 0;
        tr.names = tris[k];
        t.triangles.push_back(tr);
        for (int s = 0; s < 3; ++s)
            if (tris[k][s][0] != '~') seen[tris[k][s]].push_back({k, s});
    }
    for (auto& [name, refs] : seen) {
        if (refs.size() != 2) throw Error(ErrorKind::InvalidParameter, "edge " + name + " not shared by two sides");
        t.triangles[refs[0].tri].glue[refs[0].side] = refs[1];
        t.triangles[refs[1].tri].glue[refs[1].side] = refs[0];
    }
    t.validate();
    return t;
}

}  // namespace

DecoratedTriangulation fixture(Fixture f) {
    switch (f) {
        case Fixture::Flip:
            // Quadrilateral L, B, R, U with diagonal BU; triangle 1 marked at L, triangle 2 at B.
            return from_names({{"~LB", "BU", "~UL"}, {"~BR", "~RU", "BU"}});
        case Fixture::Pentagon:
            // Pentagon A..E fanned from D; triangles 1, 2, 3 marked at E, A, B.
            return from_names({{"~EA", "AD", "~DE"}, {"~AB", "BD", "AD"}, {"~BC", "~CD", "BD"}});
        case Fixture::FlipResult:
            // The same quadrilateral after the flip: diagonal LR, markings unchanged.
            return from_names({{"LR", "~RU", "~UL"}, {"~BR", "LR", "~LB"}});
        case Fixture::Annulus: return canned_surface(Surface::AnnulusTwoMarked);
        case Fixture::Disk: return canned_surface(Surface::DiskTwoPunctures);
    }
    return {};
}

DecoratedTriangulation canned_surface(Surface s) {
    switch (s) {
        case Surface::AnnulusTwoMarked:
            // Edges a and c cross the annulus; ~h and ~o are the inner and outer boundary arcs.
            return from_names({{"a", "c", "~h"}, {"~o", "a", "c"}});
        case Surface::DiskTwoPunctures:
            // Punctures L and R, boundary points U and B; edges LU, LB, UB, RU, RB.
            return from_names({{"LU", "~UB", "LB"}, {"LB", "UB", "LU"}, {"RU", "UB", "RB"}, {"RB", "~BU", "RU"}});
    }
    return {};
}

MoveWord canonical_word(CanonicalWord w) {
    switch (w) {
        case CanonicalWord::DehnTwistAnnulus: return {Move::flip_inv(1, 2)};
        case CanonicalWord::BraidingDisk: return parse_word("R3 r1 w23 w13 w24 w14 r3 R1 p(13)(24)", 4);
    }
    return {};
}

std::string to_json(const DecoratedTriangulation& t) {
    nlohmann::json tris = nlohmann::json::array(), marks = nlohmann::json::array(),
                   glue = nlohmann::json::array();
    for (int k = 0; k < t.size(); ++k) {
        const auto& tr = t.triangles[k];
        tris.push_back({tr.names[0], tr.names[1], tr.names[2]});
        marks.push_back(tr.marked_corner);
        for (int s = 0; s < 3; ++s) {
            SideRef p = tr.glue[s];
            if (!p.boundary() && std::make_pair(k, s) < std::make_pair(p.tri, p.side))
                glue.push_back({{k + 1, s}, {p.tri + 1, p.side}});
        }
    }
    return nlohmann::json{{"triangles", tris}, {"markings", marks}, {"gluing", glue}}.dump();
}

DecoratedTriangulation triangulation_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidParameter, std::string("triangulation json: ") + e.what());
    }
    DecoratedTriangulation t;
    std::size_t n = j.at("markings").size();
    t.triangles.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        t.triangles[k].marked_corner = j["markings"][k].get<int>();
        if (j.contains("triangles") && k < j["triangles"].size())
            for (int s = 0; s < 3; ++s) t.triangles[k].names[s] = j["triangles"][k][s].get<std::string>();
    }
    for (const auto& g : j.at("gluing")) {
        SideRef a{g[0][0].get<int>() - 1, g[0][1].get<int>()}, b{g[1][0].get<int>() - 1, g[1][1].get<int>()};
        for (SideRef r : {a, b})
            if (r.tri < 0 || r.tri >= static_cast<int>(n) || r.side < 0 || r.side > 2)
                throw Error(ErrorKind::IndexOutOfRange, "gluing entry");
        if (!t.triangles[a.tri].glue[a.side].boundary() || !t.triangles[b.tri].glue[b.side].boundary())
            throw Error(ErrorKind::InvalidParameter, "side glued twice");
        t.triangles[a.tri].glue[a.side] = b;
        t.triangles[b.tri].glue[b.side] = a;
    }
    t.validate();
    return t;
}

// ---- Relations -------------------------------------------------------------------------------

namespace {

std::vector<int> transposition(int i, int j, int n) {
    std::vector<int> s(n);
    std::iota(s.begin(), s.end(), 1);
    std::swap(s[i - 1], s[j - 1]);
    return s;
}

}  // namespace

RelationCheck relation_rho_cubed(int i) {
    return {"rho_cubed", {Move::rho(i), Move::rho(i), Move::rho(i)}, {}};
}

RelationCheck relation_pentagon(int i, int j, int k) {
    return {"pentagon", {Move::flip(i, j), Move::flip(i, k), Move::flip(j, k)}, {Move::flip(j, k), Move::flip(i, j)}};
}

RelationCheck relation_symmetry(int i, int j, int) {
    return {"symmetry",
            {Move::flip(i, j), Move::rho_inv(i), Move::rho(j)},
            {Move::rho_inv(i), Move::rho(j), Move::flip(j, i)}};
}

RelationCheck relation_inversion(int i, int j, int n) {
    return {"inversion",
            {Move::flip(i, j), Move::rho(i), Move::flip(j, i)},
            {Move::rho(i), Move::rho(j), Move::perm(transposition(i, j, n))}};
}

bool relation_holds(const DecoratedTriangulation& t, const RelationCheck& r) {
    try {
        return apply_word(t, r.lhs) == apply_word(t, r.rhs);
    } catch (const Error&) {
        return false;
    }
}

std::vector<RandomInstance> random_instances(const std::string& relation, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::vector<Fixture> starts{Fixture::Flip, Fixture::Pentagon, Fixture::Annulus, Fixture::Disk};
    std::vector<RandomInstance> out;
    auto make = [&](int n, int i, int j, int k) -> RelationCheck {
        if (relation == "rho_cubed") return relation_rho_cubed(i);
        if (relation == "pentagon") return relation_pentagon(i, j, k);
        if (relation == "symmetry") return relation_symmetry(i, j, n);
        if (relation == "inversion") return relation_inversion(i, j, n);
        throw Error(ErrorKind::InvalidParameter, "unknown relation " + relation);
    };
    for (int attempt = 0; attempt < 200 * count && static_cast<int>(out.size()) < count; ++attempt) {
        DecoratedTriangulation t = fixture(starts[rng() % starts.size()]);
        int n = t.size();
        int steps = 1 + static_cast<int>(rng() % 12);
        for (int s = 0; s < steps; ++s) {
            Move m = Move::rho(1);
            switch (rng() % 4) {
                case 0: m = Move::rho(1 + static_cast<int>(rng() % n)); break;
                case 1: m = Move::rho_inv(1 + static_cast<int>(rng() % n)); break;
                case 2: {
                    std::vector<int> s(n);
                    std::iota(s.begin(), s.end(), 1);
                    std::shuffle(s.begin(), s.end(), rng);
                    m = Move::perm(s);
                    break;
                }
                default: {
                    int i = 1 + static_cast<int>(rng() % n), j = 1 + static_cast<int>(rng() % n);
                    m = rng() % 2 ? Move::flip(i, j) : Move::flip_inv(i, j);
                }
            }
            try {
                t = apply_move(t, m);
            } catch (const Error&) {
            }
        }
        std::vector<std::array<int, 3>> cands;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (int k = 1; k <= n; ++k) {
                    bool distinct = i != j && i != k && j != k;
                    if (relation == "rho_cubed" && j == 1 && k == 1) cands.push_back({i, j, k});
                    if ((relation == "symmetry" || relation == "inversion") && i != j && k == 1) cands.push_back({i, j, k});
                    if (relation == "pentagon" && distinct) cands.push_back({i, j, k});
                }
        std::shuffle(cands.begin(), cands.end(), rng);
        for (auto [i, j, k] : cands) {
            RelationCheck r = make(n, i, j, k);
            try {
                apply_word(t, r.lhs);
            } catch (const Error&) {
                continue;
            }
            out.push_back({t, r});
            break;
        }
    }
    return out;
}

// ---- Compilation -----------------------------------------------------------------------------

std::string OperatorExpr::str() const {
    std::string s;
    for (const auto& g : gens) {
        if (!s.empty()) s += " ";
        switch (g.kind) {
            case Generator::A: s += "A" + std::to_string(g.i); break;
            case Generator::Ainv: s += "A" + std::to_string(g.i) + "^-1"; break;
            case Generator::T: s += "T" + std::to_string(g.i) + "," + std::to_string(g.j); break;
            case Generator::Tinv: s += "T" + std::to_string(g.i) + "," + std::to_string(g.j) + "^-1"; break;
            case Generator::P: s += format_move(Move::perm(g.sigma)).replace(0, 1, "P"); break;
        }
    }
    if (scalar != cplx(1.0)) {
        std::ostringstream os;
        os << "(" << scalar.real() << (scalar.imag() < 0 ? "" : "+") << scalar.imag() << "i) ";
        s = os.str() + s;
    }
    return s.empty() ? "1" : s;
}

OperatorExpr OperatorExpr::operator*(const OperatorExpr& o) const {
    OperatorExpr r = *this;
    r.gens.insert(r.gens.end(), o.gens.begin(), o.gens.end());
    r.scalar *= o.scalar;
    r.projective = projective || o.projective;
    return r;
}

OperatorExpr compile(const MoveWord& w) {
    OperatorExpr e;
    for (const auto& m : w) {
        switch (m.kind) {
            case Move::Rho: e.gens.push_back({Generator::A, m.i, 0, {}}); break;
            case Move::RhoInv: e.gens.push_back({Generator::Ainv, m.i, 0, {}}); break;
            case Move::Flip:
            case Move::FlipInv:
                if (m.i == m.j || m.i < 1 || m.j < 1) throw Error(ErrorKind::InvalidWord, format_move(m));
                e.gens.push_back({m.kind == Move::Flip ? Generator::T : Generator::Tinv, m.i, m.j, {}});
                break;
            case Move::Perm:
                check_perm(m.sigma, static_cast<int>(m.sigma.size()));
                e.gens.push_back({Generator::P, 0, 0, m.sigma});
                break;
        }
        if (m.kind != Move::Perm && m.i < 1) throw Error(ErrorKind::InvalidWord, format_move(m));
    }
    return e;
}

OperatorProgram to_program(const OperatorExpr& e, const LatticeSpec& spec, const ModularParameter& p) {
    std::vector<OperatorProgram> factors;
    auto axis = [&](int i) {
        if (i < 1 || i > spec.n_factors) throw Error(ErrorKind::IndexOutOfRange, "generator index " + std::to_string(i));
        return i - 1;
    };
    for (const auto& g : e.gens) {
        switch (g.kind) {
            case Generator::A: factors.push_back(build_A(spec, axis(g.i), p)); break;
            case Generator::Ainv: factors.push_back(build_A(spec, axis(g.i), p).inverse()); break;
            case Generator::T: factors.push_back(build_T(spec, axis(g.i), axis(g.j), p)); break;
            case Generator::Tinv: factors.push_back(build_T(spec, axis(g.i), axis(g.j), p).inverse()); break;
            case Generator::P: {
                if (static_cast<int>(g.sigma.size()) != spec.n_factors)
                    throw Error(ErrorKind::SpecMismatch, "permutation size differs from factor count");
                std::vector<int> s(g.sigma.size());
                for (std::size_t k = 0; k < s.size(); ++k) s[k] = g.sigma[k] - 1;
                factors.push_back(build_P(spec, s));
                break;
            }
        }
    }
    OperatorProgram prog = product(factors, spec.n_factors);
    if (e.scalar != cplx(1.0)) prog = prog.then(build_scalar(spec, e.scalar));
    return prog;
}

}  // namespace qteich
