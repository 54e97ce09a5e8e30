// Batch entry point: evaluate e_b, run verification suites, emit reports.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qteich/error.hpp"
#include "qteich/groupoid.hpp"
#include "qteich/spectral.hpp"
#include "qteich/suites.hpp"

using namespace qteich;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

/// Pulls --tol-<check_id>=<v> and --tol-<check_id> <v> out of argv, since CLI11 needs fixed names.
std::map<std::string, double> take_tolerances(std::vector<std::string>& args) {
    std::map<std::string, double> tol;
    std::vector<std::string> rest;
    for (std::size_t k = 0; k < args.size(); ++k) {
        const std::string& a = args[k];
        if (a.rfind("--tol-", 0) != 0) {
            rest.push_back(a);
            continue;
        }
        std::string key = a.substr(6), value;
        if (auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else if (k + 1 < args.size()) {
            value = args[++k];
        } else {
            throw Error(ErrorKind::InvalidParameter, "missing value for " + a);
        }
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size())
            throw Error(ErrorKind::InvalidParameter, "bad tolerance '" + value + "' for " + key);
        tol[key] = v;
    }
    args = rest;
    return tol;
}

/// Writes through a temporary so a failed run leaves no partial file.
void write_atomic(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Error(ErrorKind::InvalidParameter, "cannot open '" + path + "' for writing");
        f << text;
        if (!f) throw Error(ErrorKind::InvalidParameter, "write to '" + path + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string show(cplx z) {
    std::ostringstream os;
    os << std::setprecision(16) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::map<std::string, double> tolerances;
    try {
        tolerances = take_tolerances(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::reverse(args.begin(), args.end());

    CLI::App app{"qteich: quantum Teichmuller numerics"};
    app.require_subcommand(1);

    std::string suite = "all", b_text = "1", out, format = "json";
    int n_points = 0;
    std::uint64_t seed = 7;
    double qgroup_b = 0.4;
    auto* verify = app.add_subcommand("verify", "run a verification suite and write a report");
    verify->add_option("--suite", suite, "qdilog|ramanujan|system|pentagon|yangbaxter|dehn|spectral|groupoid|qgroup|all");
    verify->add_option("--b", b_text, "coupling b, real or complex (0.8+0.6i)");
    verify->add_option("--n-points", n_points, "lattice points per factor; 0 keeps suite defaults")->check(CLI::NonNegativeNumber);
    verify->add_option("--seed", seed, "ensemble seed");
    verify->add_option("--qgroup-b", qgroup_b, "b used by the quantum-group suite")->check(CLI::PositiveNumber);
    verify->add_option("--out", out, "report path; stdout when absent");
    verify->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    verify->footer("Per-check tolerance overrides: --tol-<check_id>=<value>.");

    std::string z_text = "0", strategy = "auto";
    auto* eval = app.add_subcommand("eval", "evaluate e_b(z)");
    eval->add_option("--z", z_text, "argument, real or complex")->required();
    eval->add_option("--b", b_text, "coupling b");
    eval->add_option("--strategy", strategy, "integral|product|auto")->check(CLI::IsMember({"integral", "product", "auto"}));

    double s = 0.7, x_min = -3, x_max = 3, epsilon = 1e-4;
    int count = 61;
    auto* kernel = app.add_subcommand("kernel", "tabulate the L eigenfunction <x|alpha_s> as CSV");
    kernel->add_option("--s", s, "spectral parameter");
    kernel->add_option("--b", b_text, "coupling b (real)");
    kernel->add_option("--x-min", x_min);
    kernel->add_option("--x-max", x_max);
    kernel->add_option("--count", count)->check(CLI::Range(2, 100000));
    kernel->add_option("--epsilon", epsilon)->check(CLI::PositiveNumber);
    kernel->add_option("--out", out, "CSV path; stdout when absent");

    std::string surface = "annulus", word;
    bool do_compile = false;
    auto* move = app.add_subcommand("groupoid", "apply a move word to a canned triangulation");
    move->add_option("--surface", surface, "annulus|disk|flip|pentagon")
        ->check(CLI::IsMember({"annulus", "disk", "flip", "pentagon"}));
    move->add_option("--word", word, "moves such as \"r1 w12 p(12)\"; twist and braid name the canned words")->required();
    move->add_flag("--compile", do_compile, "print the operator word instead of the triangulation");

    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*verify) {
            SuiteConfig cfg;
            cfg.suite = parse_suite(suite);
            cfg.b = parse_complex(b_text);
            ModularParameter::make(cfg.b);
            ModularParameter::make(qgroup_b);
            cfg.n_points = n_points;
            cfg.seed = seed;
            cfg.qgroup_b = qgroup_b;
            cfg.tolerances = tolerances;
            if (n_points != 0 && (n_points < 8 || n_points % 2 != 0))
                throw Error(ErrorKind::InvalidParameter, "--n-points must be even and at least 8");
            std::vector<CheckRecord> records;
            try {
                records = run_suite(cfg);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::InvalidParameter) throw;
                std::cerr << "error: " << e.what() << "\n";
                return kExitFail;
            }
            write_atomic(out, format == "json" ? report_json(records) : report_csv(records));
            int failed = 0;
            for (const auto& r : records) failed += !r.pass;
            std::cerr << records.size() - failed << "/" << records.size() << " checks passed\n";
            return failed == 0 ? 0 : kExitFail;
        }
        if (*eval) {
            const ModularParameter p = ModularParameter::make(parse_complex(b_text));
            const cplx z = parse_complex(z_text);
            cplx value;
            std::string used = strategy;
            double err = 0;
            if (strategy == "integral") {
                value = eb_integral(z, p);
            } else if (strategy == "product") {
                int trunc = 64;
                ProductValue v = eb_product(z, p, trunc);
                while (v.tail_bound > 1e-17 && trunc < (1 << 20)) v = eb_product(z, p, trunc *= 2);
                value = v.value;
                err = v.tail_bound;
            } else {
                const Evaluation e = eb_eval(z, p);
                value = e.value;
                used = e.strategy;
                err = e.error_estimate;
            }
            std::cout << "value: " << show(value) << "\nstrategy: " << used << "\nerror_estimate: " << err << "\n";
            const cplx partner = z == cplx(0) ? value : eb(-z, p);
            std::cout << "inversion_residual: " << std::abs(value * partner / inversion_factor(z, p) - 1.0) << "\n";
            if (p.unitary_regime && z.imag() == 0) std::cout << "modulus: " << std::setprecision(16) << std::abs(value) << "\n";
            return 0;
        }
        if (*kernel) {
            const ModularParameter p = ModularParameter::make(parse_complex(b_text));
            if (!p.unitary_regime) throw Error(ErrorKind::RegimeViolation, "the kernel table needs real b");
            std::ostringstream os;
            os << "x,re,im,abs\n" << std::setprecision(12);
            for (int k = 0; k < count; ++k) {
                const double x = x_min + (x_max - x_min) * k / (count - 1);
                const cplx v = alpha_kernel_limit(x, {s, epsilon, p});
                os << x << "," << v.real() << "," << v.imag() << "," << std::abs(v) << "\n";
            }
            write_atomic(out, os.str());
            return 0;
        }
        if (*move) {
            const std::map<std::string, DecoratedTriangulation> surfaces{
                {"annulus", canned_surface(Surface::AnnulusTwoMarked)},
                {"disk", canned_surface(Surface::DiskTwoPunctures)},
                {"flip", fixture(Fixture::Flip)},
                {"pentagon", fixture(Fixture::Pentagon)}};
            const DecoratedTriangulation& t = surfaces.at(surface);
            MoveWord w = word == "twist"   ? canonical_word(CanonicalWord::DehnTwistAnnulus)
                         : word == "braid" ? canonical_word(CanonicalWord::BraidingDisk)
                                           : parse_word(word, t.size());
            if (do_compile) {
                std::cout << compile(w).str() << "\n";
            } else {
                const DecoratedTriangulation r = apply_word(t, w);
                std::cout << to_json(r) << "\n" << (r == t ? "returns to the start\n" : "differs from the start\n");
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
