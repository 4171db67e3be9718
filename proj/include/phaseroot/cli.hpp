#pragma once

// Command-line front end. Kept in a header so the test suite can drive it
// without spawning processes; tools/phaseroot.cpp is the thin main().

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phaseroot/bessel.hpp"
#include "phaseroot/error.hpp"
#include "phaseroot/gauss.hpp"
#include "phaseroot/parallel.hpp"
#include "phaseroot/problems.hpp"
#include "phaseroot/rootfind.hpp"

namespace phaseroot::cli {

enum ExitCode : int { ok = 0, usage = 2, numerical = 3 };

enum class Format { text, json };

struct OutputSpec {
    Format format = Format::text;
    int precision = 17;
    std::string destination;  // empty means the given stream
};

/// Shortest round-trip decimal at 17 digits; %.<p>g-style otherwise.
[[nodiscard]] inline std::string format_double(double x, int precision) {
    char buf[64];
    const auto res = precision >= 17 ? std::to_chars(buf, buf + sizeof buf, x)
                                     : std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, precision);
    return {buf, res.ptr};
}

/// The value that the text output would print, parsed back (for JSON).
[[nodiscard]] inline double rounded(double x, int precision) {
    if (precision >= 17) return x;
    const std::string s = format_double(x, precision);
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

namespace detail {

struct Payload {
    std::string family;
    long n = 0;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::vector<double> first;   // nodes or roots
    std::vector<double> second;  // weights (empty for roots)
    std::optional<long> count;   // count-only result
};

inline void emit(const Payload& p, const OutputSpec& spec, std::ostream& os) {
    if (spec.format == Format::text) {
        if (p.count) {
            os << *p.count << '\n';
            return;
        }
        for (std::size_t i = 0; i < p.first.size(); ++i) {
            os << format_double(p.first[i], spec.precision);
            if (!p.second.empty()) os << ' ' << format_double(p.second[i], spec.precision);
            os << '\n';
        }
        return;
    }
    nlohmann::ordered_json j;
    j["family"] = p.family;
    j["n"] = p.n;
    j["params"] = p.params;
    auto arr = [&](const std::vector<double>& v) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (double x : v) a.push_back(rounded(x, spec.precision));
        return a;
    };
    if (p.count) {
        j["count"] = *p.count;
    } else if (p.second.empty()) {
        j["roots"] = arr(p.first);
    } else {
        j["nodes"] = arr(p.first);
        j["weights"] = arr(p.second);
    }
    os << j.dump() << '\n';
}

inline Payload from_rule(const QuadratureRule& r) {
    Payload p;
    p.family = std::string(to_string(r.family));
    p.n = r.n;
    if (r.family != RuleFamily::legendre) p.params["gamma"] = r.gamma;
    if (r.family == RuleFamily::jacobi) p.params["zeta"] = r.zeta;
    p.first = r.nodes;
    p.second = r.weights;
    return p;
}

}  // namespace detail

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Roots of oscillatory ODEs and Gaussian quadrature rules via nonoscillatory phase functions",
                 "phaseroot"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    OutputSpec spec;
    std::string format = "text";
    std::optional<int> order_k;
    std::optional<double> tol;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--precision", spec.precision, "Significant digits (1-17)")->check(CLI::Range(1, 17));
    app.add_option("--order-k", order_k, "Chebyshev points per piece")->check(CLI::Range(4, 200));
    app.add_option("--tol", tol, "Trailing-coefficient tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out", spec.destination, "Write output to this file");

    int n = 0;
    double gamma = 0.0, zeta = 0.0;
    auto* leg = app.add_subcommand("legendre", "Gauss-Legendre rule");
    leg->add_option("n", n, "Number of nodes")->required();
    auto* jac = app.add_subcommand("jacobi", "Gauss-Jacobi rule for (1-t)^gamma (1+t)^zeta");
    jac->add_option("n", n, "Number of nodes")->required();
    jac->add_option("--gamma", gamma, "Exponent at t = 1")->required();
    jac->add_option("--zeta", zeta, "Exponent at t = -1")->required();
    auto* lag = app.add_subcommand("laguerre", "Generalized Gauss-Laguerre rule for t^gamma e^-t");
    lag->add_option("n", n, "Number of nodes")->required();
    lag->add_option("--gamma", gamma, "Exponent of t")->default_val(0.0);

    double nu = 0.0;
    long count = 0;
    auto* bes = app.add_subcommand("bessel", "Positive zeros of J_nu");
    bes->add_option("--nu", nu, "Order (>= 1)")->required();
    bes->add_option("--count", count, "Number of zeros")->required();

    std::string problem;
    double lambda = 0.0;
    std::optional<long> kth;
    bool count_only = false;
    auto* rts = app.add_subcommand("roots", "Roots of y'' + lambda^2 q y = 0 for a built-in coefficient");
    rts->add_option("--problem", problem, "Built-in coefficient")->required()->check(CLI::IsMember({"artificial"}));
    rts->add_option("--lambda", lambda, "Frequency parameter")->required()->check(CLI::PositiveNumber);
    auto* kopt = rts->add_option("--kth", kth, "Print only the k-th interior root")->check(CLI::PositiveNumber);
    rts->add_flag("--count-only", count_only, "Print only the number of interior roots")->excludes(kopt);

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage;
    }
    spec.format = format == "json" ? Format::json : Format::text;

    auto options_for = [&](SolverOptions o) {
        if (order_k) o.k = *order_k;
        if (tol) o.coeff_tol = *tol;
        return o;
    };
    const unsigned threads = default_thread_count();

    detail::Payload payload;
    try {
        if (*leg) {
            payload = detail::from_rule(legendre_rule(n, options_for(family_options(RuleFamily::legendre)), threads));
        } else if (*jac) {
            payload = detail::from_rule(jacobi_rule(n, gamma, zeta, options_for(family_options(RuleFamily::jacobi)), threads));
        } else if (*lag) {
            payload = detail::from_rule(laguerre_rule(n, gamma, options_for(family_options(RuleFamily::laguerre)), threads));
        } else if (*bes) {
            SolverOptions o;
            o.k = 30;
            payload.family = "bessel";
            payload.n = count;
            payload.params["nu"] = nu;
            payload.first = bessel_roots(BesselJob{nu, count}, options_for(o), threads);
        } else {
            const auto prob = artificial_problem(lambda);
            const SolverOptions o = options_for(SolverOptions{});
            const auto phase = build_phase(prob, o);
            const auto inv = invert_phase(phase, o);
            const auto [c1, c2] = fit_amplitude(0.0, lambda, phase);  // y(0) = 0, y'(0) = lambda
            const auto amp = to_polar(c1, c2);
            const auto span = root_span(phase, amp);
            const long first = span.root_at_a ? 2 : 1;  // t = 0 is a root by construction
            payload.family = "roots";
            payload.params["problem"] = problem;
            payload.params["lambda"] = lambda;
            payload.n = span.interior();
            if (count_only) {
                payload.count = span.interior();
            } else if (kth) {
                if (*kth > span.interior()) {
                    throw Error("cli", ErrorKind::invalid_argument,
                                "--kth exceeds the " + std::to_string(span.interior()) + " interior roots");
                }
                payload.first = {kth_root(phase, inv, amp, first + *kth - 1)};
            } else {
                const auto rr = roots_range(phase, inv, amp, first, first + span.interior() - 1, threads);
                payload.first.reserve(rr.size());
                for (const auto& r : rr) payload.first.push_back(r.t + r.t_lo);
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::invalid_argument ? usage : numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return numerical;
    }

    if (spec.destination.empty()) {
        detail::emit(payload, spec, out);
        return out ? ok : numerical;
    }
    std::ofstream file(spec.destination, std::ios::binary);
    if (!file) {
        err << "error: cannot open " << spec.destination << '\n';
        return usage;
    }
    detail::emit(payload, spec, file);
    return file ? ok : numerical;
}

}  // namespace phaseroot::cli
