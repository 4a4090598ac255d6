// ============================================================
// medianbm command-line driver.
//
// Subcommands:
//   kernel-eval   closed-form kernel quantities (one number out)
//   walk          trinomial walk: exact phi, MC check, bound shapes
//   simulate      ensemble draws: median paths, component-wise
//                 medians, diffusive-scaling pairs, jump frequency
//   limit-sample  exact draws of the limit process; local-exponent
//                 slopes (closed form and Monte Carlo)
//   verify        inequality verifiers and the full battery
//   report        aggregate a result CSV into an exit code
//
// Global flags: --seed (generated and announced when absent),
// --threads (worker count; never changes output bytes), --config
// (INI-style defaults, [subcommand] sections, flags win).
// Exit codes: 0 success or all-passed, 1 verification failure,
// 2 usage or config error.
// ============================================================

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <medianbm/verification_suite.hpp>

using nlohmann::json;
using namespace medianbm;

namespace {

// fresh entropy for runs without --seed; the derived value is printed
// so any run can be reproduced exactly
std::uint64_t fresh_seed() {
    std::random_device rd;
    const std::uint64_t raw =
        (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    return derive_key(raw, stream_tag::kSeedless);
}

struct SeedSource {
    std::optional<std::uint64_t> given;

    std::uint64_t get() {
        if (!given) {
            given = fresh_seed();
            std::fprintf(stderr,
                         "seed = %s (generated; pass --seed %s to reproduce)\n",
                         format_uint(*given).c_str(),
                         format_uint(*given).c_str());
        }
        return *given;
    }
};

std::vector<double> split_doubles(const std::string& list) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const std::size_t comma = list.find(',', pos);
        const std::size_t end = comma == std::string::npos ? list.size() : comma;
        out.push_back(parse_double(list.substr(pos, end - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

// CSV goes to --out when given, else to stdout
std::ostream& open_target(const std::string& path, std::ofstream& holder) {
    if (path.empty()) return std::cout;
    holder.open(path, std::ios::binary);
    if (!holder) throw std::runtime_error("cannot open output file " + path);
    return holder;
}

void write_json_file(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    os << j.dump(2) << '\n';
}

json report_to_json(const VerificationReport& r) {
    json meta = json::object();
    for (const auto& [k, v] : r.metadata) meta[k] = v;
    json lhs = {{"mean", r.lhs.mean},
                {"std_err", r.lhs.std_err},
                {"kind", r.lhs_is_mc ? "monte-carlo" : "analytic"}};
    if (r.lhs_is_mc) {
        lhs["reps"] = r.lhs.reps;
        lhs["seed"] = r.lhs.seed;
        lhs["low_count"] = r.lhs.low_count;
    }
    return {{"claim", r.claim}, {"passed", r.passed},   {"lhs", lhs},
            {"rhs", r.rhs},     {"margin", r.margin},   {"metadata", meta}};
}

// prints the structured text form and handles the optional CSV/JSON
// sinks shared by every single-report verify suite
int finish_report(const VerificationReport& r, const std::string& csv_path,
                  const std::string& json_path) {
    std::cout << to_text(r);
    if (!csv_path.empty()) {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file " + csv_path);
        write_csv_row(os, report_csv_header());
        write_csv_row(os, report_csv_row(r));
    }
    write_json_file(json_path, report_to_json(r));
    return r.passed ? 0 : 1;
}

// ------------------------------------------------------------
// kernel-eval
// ------------------------------------------------------------

struct KernelArgs {
    std::string op;
    std::optional<double> s, t, x, y, delta, kappa;
    std::optional<std::int64_t> n;
    std::string json_path;
};

int run_kernel_eval(const KernelArgs& a) {
    auto need = [](const std::optional<double>& v,
                   const char* flag) -> double {
        if (!v)
            throw std::invalid_argument(std::string("kernel-eval: --op ") +
                                        "requires " + flag);
        return *v;
    };
    auto need_n = [&]() -> int {
        if (!a.n) throw std::invalid_argument("kernel-eval: --op requires --n");
        return static_cast<int>(*a.n);
    };
    double value = 0.0;
    if (a.op == "limit-covariance")
        value = limit_covariance(need(a.s, "--s"), need(a.t, "--t"));
    else if (a.op == "median-density")
        value = median_density(need_n(), need(a.x, "--x"));
    else if (a.op == "median-cdf")
        value = median_cdf(need_n(), need(a.x, "--x"));
    else if (a.op == "tail-mass")
        value = tail_bound_check(need_n(), need(a.y, "--y"),
                                 a.kappa.value_or(3.0))
                    .lhs;
    else if (a.op == "psi")
        value = psi(need(a.x, "--x"), need(a.y, "--y"),
                    need(a.delta, "--delta"));
    else if (a.op == "p1")
        value = p1(need(a.x, "--x"), need(a.y, "--y"),
                   need(a.delta, "--delta"));
    else  // p2; the op list is closed by an IsMember check
        value = p2(need(a.x, "--x"), need(a.y, "--y"),
                   need(a.delta, "--delta"));
    std::cout << format_double(value) << '\n';

    json j = {{"subcommand", "kernel-eval"}, {"op", a.op}, {"value", value}};
    if (a.s) j["s"] = *a.s;
    if (a.t) j["t"] = *a.t;
    if (a.x) j["x"] = *a.x;
    if (a.y) j["y"] = *a.y;
    if (a.delta) j["delta"] = *a.delta;
    if (a.kappa) j["kappa"] = *a.kappa;
    if (a.n) j["n"] = *a.n;
    write_json_file(a.json_path, j);
    return 0;
}

// ------------------------------------------------------------
// walk
// ------------------------------------------------------------

struct WalkArgs {
    double pt1 = 0.0, pt2 = 0.0;
    std::int64_t k = 0;
    std::optional<std::int64_t> reps;
    std::optional<double> p;
    std::string dist_path, json_path;
};

int run_walk(const WalkArgs& a, SeedSource& seeds) {
    const TrinomialSpec spec{a.pt1, a.pt2};
    json j = {{"subcommand", "walk"},
              {"pt1", a.pt1},
              {"pt2", a.pt2},
              {"k", a.k}};

    std::optional<double> exact;
    if (a.k <= 20000) {
        exact = phi_k(spec, a.k);
        std::cout << "phi = " << format_double(*exact) << '\n';
        j["phi"] = *exact;
    } else if (!a.reps) {
        throw std::invalid_argument(
            "walk: k above the exact-DP cap (20000); pass --reps for a "
            "Monte Carlo estimate");
    }

    if (a.reps) {
        const std::uint64_t seed = seeds.get();
        const MCEstimate mc = mc_phi_k(spec, a.k, *a.reps, seed);
        std::cout << "mc_mean = " << format_double(mc.mean) << '\n'
                  << "mc_se = " << format_double(mc.std_err) << '\n'
                  << "mc_reps = " << format_int(mc.reps) << '\n'
                  << "mc_seed = " << format_uint(mc.seed) << '\n';
        j["mc"] = {{"mean", mc.mean},
                   {"std_err", mc.std_err},
                   {"reps", mc.reps},
                   {"seed", mc.seed},
                   {"low_count", mc.low_count}};
    }

    if (a.p) {
        const double cheby = cheby_bound_shape(spec, a.k, *a.p);
        std::cout << "cheby = " << format_double(cheby) << '\n';
        j["p"] = *a.p;
        j["cheby"] = cheby;
        if (spec.pt1 + spec.pt2 < 0.5) {
            const double sharp = chebyplus_bound_shape(spec, a.k, *a.p);
            std::cout << "chebyplus = " << format_double(sharp) << '\n';
            j["chebyplus"] = sharp;
        } else {
            std::cout << "chebyplus = skipped (step probability >= 1/2)\n";
        }
    }

    if (!a.dist_path.empty()) {
        const WalkDistribution dist = exact_distribution(spec, a.k);
        std::ofstream os(a.dist_path, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open output file " + a.dist_path);
        write_csv_row(os, {"pt1", "pt2", "k", "value", "probability"});
        for (std::int64_t v = -dist.k; v <= dist.k; ++v)
            write_csv_row(os, {format_double(a.pt1), format_double(a.pt2),
                               format_int(a.k), format_int(v),
                               format_double(dist.prob(v))});
    }

    write_json_file(a.json_path, j);
    return 0;
}

// ------------------------------------------------------------
// simulate
// ------------------------------------------------------------

struct SimulateArgs {
    std::string mode = "median";
    std::optional<std::int64_t> n, d, reps;
    std::string grid, cov;
    std::optional<double> t, c, delta, eps;
    std::string out_path, json_path;
};

std::int64_t need_count(const std::optional<std::int64_t>& v,
                        const char* flag, const char* sub) {
    if (!v)
        throw std::invalid_argument(std::string(sub) + ": requires " + flag);
    return *v;
}

double need_value(const std::optional<double>& v, const char* flag,
                  const char* sub) {
    if (!v)
        throw std::invalid_argument(std::string(sub) + ": requires " + flag);
    return *v;
}

int run_simulate(const SimulateArgs& a, SeedSource& seeds) {
    const std::int64_t reps = need_count(a.reps, "--reps", "simulate");
    const std::uint64_t seed = seeds.get();
    std::ofstream holder;
    std::ostream& os = open_target(a.out_path, holder);
    json j = {{"subcommand", "simulate"},
              {"mode", a.mode},
              {"seed", seed},
              {"reps", reps}};

    if (a.mode == "median") {
        const std::int64_t n = need_count(a.n, "--n", "simulate");
        if (a.grid.empty())
            throw std::invalid_argument("simulate: requires --grid");
        const TimeGrid grid{split_doubles(a.grid)};
        const auto rows = median_ensemble_samples(n, grid, reps, seed);
        std::vector<std::string> header = {"seed", "n", "rep"};
        for (double t : grid.times) header.push_back("x(" + format_double(t) + ")");
        write_csv_row(os, header);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::vector<std::string> row = {format_uint(seed), format_int(n),
                                            format_uint(r)};
            for (double v : rows[r]) row.push_back(format_double(v));
            write_csv_row(os, row);
        }
        j["n"] = n;
        j["grid"] = grid.times;
        j["rows"] = rows.size();
    } else if (a.mode == "componentwise") {
        const std::int64_t n = need_count(a.n, "--n", "simulate");
        const std::int64_t d = need_count(a.d, "--d", "simulate");
        if (a.cov.empty())
            throw std::invalid_argument(
                "simulate: requires --cov (row-major d*d list)");
        const std::vector<double> cov = split_doubles(a.cov);
        const auto rows = componentwise_median_sample(d, cov, n, reps, seed);
        std::string cov_joined;
        for (std::size_t i = 0; i < cov.size(); ++i) {
            if (i > 0) cov_joined.push_back(';');
            cov_joined += format_double(cov[i]);
        }
        std::vector<std::string> header = {"seed", "n", "d", "cov", "rep"};
        for (std::int64_t c = 0; c < d; ++c)
            header.push_back("m" + format_int(c));
        write_csv_row(os, header);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::vector<std::string> row = {format_uint(seed), format_int(n),
                                            format_int(d), cov_joined,
                                            format_uint(r)};
            for (double v : rows[r]) row.push_back(format_double(v));
            write_csv_row(os, row);
        }
        j["n"] = n;
        j["d"] = d;
        j["cov"] = cov;
        j["rows"] = rows.size();
    } else if (a.mode == "scaling") {
        const std::int64_t n = need_count(a.n, "--n", "simulate");
        const double t = need_value(a.t, "--t", "simulate");
        const double c = need_value(a.c, "--c", "simulate");
        const auto [xa, xb] = scaling_law_samples(n, t, c, reps, seed);
        write_csv_row(os, {"seed", "n", "t", "c", "rep", "x_ct", "sqrtc_x_t"});
        for (std::size_t r = 0; r < xa.size(); ++r)
            write_csv_row(os, {format_uint(seed), format_int(n),
                               format_double(t), format_double(c),
                               format_uint(r), format_double(xa[r]),
                               format_double(xb[r])});
        j["n"] = n;
        j["t"] = t;
        j["c"] = c;
        j["rows"] = xa.size();
    } else {  // jump; the mode list is closed by an IsMember check
        const std::int64_t n = need_count(a.n, "--n", "simulate");
        const double delta = need_value(a.delta, "--delta", "simulate");
        const double eps = need_value(a.eps, "--eps", "simulate");
        const MCEstimate est = jump_probability(n, delta, eps, reps, seed);
        write_csv_row(os, {"seed", "n", "delta", "eps", "reps", "mean", "se",
                           "low_count"});
        write_csv_row(os, {format_uint(seed), format_int(n),
                           format_double(delta), format_double(eps),
                           format_int(est.reps), format_double(est.mean),
                           format_double(est.std_err),
                           est.low_count ? "yes" : "no"});
        j["n"] = n;
        j["delta"] = delta;
        j["eps"] = eps;
        j["mean"] = est.mean;
        j["std_err"] = est.std_err;
        j["low_count"] = est.low_count;
    }

    if (!a.out_path.empty()) j["out"] = a.out_path;
    write_json_file(a.json_path, j);
    return 0;
}

// ------------------------------------------------------------
// limit-sample
// ------------------------------------------------------------

struct LimitArgs {
    std::string op = "sample";
    std::string grid, gaps;
    std::optional<std::int64_t> reps;
    std::optional<double> t;
    std::string process = "arcsine";
    std::string out_path, json_path;
};

int run_limit_sample(const LimitArgs& a, SeedSource& seeds) {
    const Process proc =
        a.process == "brownian" ? Process::kBrownian : Process::kArcsine;
    json j = {{"subcommand", "limit-sample"}, {"op", a.op}};

    if (a.op == "sample") {
        if (a.grid.empty())
            throw std::invalid_argument("limit-sample: requires --grid");
        const std::int64_t reps = need_count(a.reps, "--reps", "limit-sample");
        const std::uint64_t seed = seeds.get();
        const TimeGrid grid{split_doubles(a.grid)};
        const LimitSample sample = sample_limit(grid, reps, seed);
        std::ofstream holder;
        std::ostream& os = open_target(a.out_path, holder);
        std::vector<std::string> header = {"seed", "rep"};
        for (double t : grid.times) header.push_back("x(" + format_double(t) + ")");
        write_csv_row(os, header);
        for (std::size_t r = 0; r < sample.draws.size(); ++r) {
            std::vector<std::string> row = {format_uint(seed), format_uint(r)};
            for (double v : sample.draws[r]) row.push_back(format_double(v));
            write_csv_row(os, row);
        }
        j["seed"] = seed;
        j["reps"] = reps;
        j["grid"] = grid.times;
        j["jitter_used"] = sample.cov.jitter_used;
        if (!a.out_path.empty()) j["out"] = a.out_path;
    } else {
        if (a.gaps.empty())
            throw std::invalid_argument("limit-sample: requires --gaps");
        const std::vector<double> gaps = split_doubles(a.gaps);
        const double t = a.t.value_or(1.0);
        double slope = 0.0;
        if (a.op == "holder-closed") {
            slope = holder_scaling_closed_form(t, gaps, proc);
        } else {  // holder-mc; the op list is closed by an IsMember check
            const std::int64_t reps =
                need_count(a.reps, "--reps", "limit-sample");
            const std::uint64_t seed = seeds.get();
            slope = holder_scaling_estimate(t, gaps, reps, seed, proc);
            j["seed"] = seed;
            j["reps"] = reps;
        }
        std::cout << format_double(slope) << '\n';
        j["t"] = t;
        j["gaps"] = gaps;
        j["process"] = a.process;
        j["slope"] = slope;
    }

    write_json_file(a.json_path, j);
    return 0;
}

// ------------------------------------------------------------
// verify
// ------------------------------------------------------------

struct VerifyArgs {
    std::string suite;
    std::optional<std::int64_t> n, reps;
    std::string delta;  // scalar for cond/split/key, list for certificates
    std::optional<double> y, x0, eps, p, delta0, ratio_cap;
    std::string alpha, beta;
    std::string out_dir = "verify_out";
    std::string csv_path, json_path;
};

double single_value(const std::string& list, const char* flag,
                    const char* sub) {
    if (list.empty())
        throw std::invalid_argument(std::string(sub) + ": requires " + flag);
    const std::vector<double> vals = split_doubles(list);
    if (vals.size() != 1)
        throw std::invalid_argument(std::string(sub) + ": " + flag +
                                    " takes a single value here");
    return vals[0];
}

int run_verify(const VerifyArgs& a, SeedSource& seeds) {
    if (a.suite == "acceptance") {
        const std::uint64_t seed = seeds.get();
        std::filesystem::create_directories(a.out_dir);
        const SuiteResult suite = run_verification_suite(seed);
        write_suite_files(a.out_dir, "", suite, seed);
        for (const auto& c : suite.criteria)
            std::printf("%-4s %s %s\n", c.id.c_str(),
                        c.passed ? "PASS" : "FAIL", c.summary.c_str());
        std::printf("battery: %s (outputs in %s)\n",
                    suite.all_passed ? "PASS" : "FAIL", a.out_dir.c_str());
        return suite.all_passed ? 0 : 1;
    }
    if (a.suite == "cond") {
        const std::int64_t n = need_count(a.n, "--n", "verify");
        const double y = need_value(a.y, "--y", "verify");
        const double delta = single_value(a.delta, "--delta", "verify");
        const std::int64_t reps = need_count(a.reps, "--reps", "verify");
        const auto r = verify_cond_inequality(n, y, delta, reps, seeds.get());
        return finish_report(r, a.csv_path, a.json_path);
    }
    if (a.suite == "split") {
        const std::int64_t n = need_count(a.n, "--n", "verify");
        const double y = need_value(a.y, "--y", "verify");
        const double delta = single_value(a.delta, "--delta", "verify");
        const std::int64_t reps = need_count(a.reps, "--reps", "verify");
        const std::uint64_t seed = seeds.get();
        const auto r = a.x0 ? verify_split_bound(n, y, delta, *a.x0, reps, seed)
                            : verify_split_bound(n, y, delta, reps, seed);
        return finish_report(r, a.csv_path, a.json_path);
    }

    VerifierConfig cfg;
    if (a.delta0) cfg.delta0 = *a.delta0;
    if (a.ratio_cap) cfg.ratio_cap = *a.ratio_cap;

    if (a.suite == "key") {
        const double eps = need_value(a.eps, "--eps", "verify");
        const double delta = single_value(a.delta, "--delta", "verify");
        const std::int64_t n = need_count(a.n, "--n", "verify");
        const double p = need_value(a.p, "--p", "verify");
        const std::int64_t reps = need_count(a.reps, "--reps", "verify");
        const auto r =
            verify_key_estimate(eps, delta, n, p, reps, seeds.get(), cfg);
        return finish_report(r, a.csv_path, a.json_path);
    }
    // certificates; the suite list is closed by an IsMember check
    if (a.alpha.empty() || a.beta.empty() || a.delta.empty())
        throw std::invalid_argument(
            "verify: certificates requires --alpha, --beta and --delta "
            "lists");
    std::vector<CertificatePoint> pts;
    for (double al : split_doubles(a.alpha))
        for (double be : split_doubles(a.beta))
            for (double de : split_doubles(a.delta)) pts.push_back({al, be, de});
    const auto r = verify_expansion_certificates(pts, cfg);
    return finish_report(r, a.csv_path, a.json_path);
}

// ------------------------------------------------------------
// report
// ------------------------------------------------------------

struct ReportArgs {
    std::string in_path;
    std::string json_path;
};

int run_report(const ReportArgs& a) {
    std::ifstream in(a.in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file " + a.in_path);
    const auto rows = parse_csv(in);
    if (rows.empty())
        throw std::invalid_argument("report: " + a.in_path + " is empty");
    const auto& header = rows.front();
    std::size_t passed_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "passed") passed_col = i;
    if (passed_col == header.size())
        throw std::invalid_argument("report: " + a.in_path +
                                    " has no passed column");

    std::int64_t total = 0, passed = 0;
    json failures = json::array();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() <= passed_col)
            throw std::invalid_argument("report: short row " + format_uint(r) +
                                        " in " + a.in_path);
        const std::string& id = rows[r].front();
        const std::string& flag = rows[r][passed_col];
        const bool ok = flag == "yes" || flag == "true" || flag == "1";
        ++total;
        if (ok)
            ++passed;
        else
            failures.push_back(id);
        std::printf("%s: %s\n", id.c_str(), ok ? "pass" : "FAIL");
    }
    std::printf("passed %s of %s\n", format_int(passed).c_str(),
                format_int(total).c_str());
    write_json_file(a.json_path, {{"subcommand", "report"},
                                  {"in", a.in_path},
                                  {"total", total},
                                  {"passed", passed},
                                  {"all_passed", passed == total},
                                  {"failures", failures}});
    return passed == total ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and verification toolkit for the scaled median "
                 "of independent Brownian motions"};
    app.require_subcommand(1);
    app.fallthrough(true);
    app.set_config("--config", "",
                   "INI-style defaults with [subcommand] sections; "
                   "command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    SeedSource seeds;
    std::optional<std::int64_t> threads;
    app.add_option("--seed", seeds.given,
                   "RNG seed; generated and announced when absent");
    app.add_option("--threads", threads,
                   "worker count (never changes output bytes)")
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{4096}));

    KernelArgs ka;
    auto* kernel = app.add_subcommand(
        "kernel-eval", "evaluate a closed-form kernel quantity");
    kernel
        ->add_option("--op", ka.op, "quantity to evaluate")
        ->required()
        ->check(CLI::IsMember({"limit-covariance", "median-density",
                               "median-cdf", "tail-mass", "psi", "p1", "p2"}));
    kernel->add_option("--s", ka.s, "first time");
    kernel->add_option("--t", ka.t, "second time");
    kernel->add_option("--x", ka.x, "space point");
    kernel->add_option("--y", ka.y, "offset / tail depth");
    kernel->add_option("--delta", ka.delta, "time increment");
    kernel->add_option("--kappa", ka.kappa, "tail power (default 3)");
    kernel->add_option("--n", ka.n, "particle count (odd)");
    kernel->add_option("--json", ka.json_path, "write a JSON summary here");

    WalkArgs wa;
    auto* walk =
        app.add_subcommand("walk", "trinomial-walk probabilities and bounds");
    walk->add_option("--pt1", wa.pt1, "down-step probability")->required();
    walk->add_option("--pt2", wa.pt2, "up-step probability")->required();
    walk->add_option("--k", wa.k, "number of steps")->required();
    walk->add_option("--reps", wa.reps, "Monte Carlo replications");
    walk->add_option("--p", wa.p, "moment power for the bound shapes");
    walk->add_option("--dist", wa.dist_path, "write the exact pmf CSV here");
    walk->add_option("--json", wa.json_path, "write a JSON summary here");

    SimulateArgs sa;
    auto* simulate =
        app.add_subcommand("simulate", "draw from the particle ensemble");
    simulate->add_option("--mode", sa.mode, "what to simulate")
        ->check(CLI::IsMember({"median", "componentwise", "scaling", "jump"}));
    simulate->add_option("--n", sa.n, "particle count");
    simulate->add_option("--reps", sa.reps, "replications");
    simulate->add_option("--grid", sa.grid, "comma list of times");
    simulate->add_option("--d", sa.d, "vector dimension");
    simulate->add_option("--cov", sa.cov, "row-major d*d covariance list");
    simulate->add_option("--t", sa.t, "base time");
    simulate->add_option("--c", sa.c, "time-scaling factor");
    simulate->add_option("--delta", sa.delta, "jump window width");
    simulate->add_option("--eps", sa.eps, "jump threshold (scaled units)");
    simulate->add_option("--out", sa.out_path, "CSV path (default stdout)");
    simulate->add_option("--json", sa.json_path, "write a JSON summary here");

    LimitArgs la;
    auto* limit = app.add_subcommand(
        "limit-sample", "draw from the limit process / local exponent");
    limit->add_option("--op", la.op, "sample or slope estimation")
        ->check(CLI::IsMember({"sample", "holder-closed", "holder-mc"}));
    limit->add_option("--grid", la.grid, "comma list of times");
    limit->add_option("--reps", la.reps, "replications");
    limit->add_option("--t", la.t, "base time for increments (default 1)");
    limit->add_option("--gaps", la.gaps, "comma list of increment gaps");
    limit->add_option("--process", la.process, "arcsine or brownian")
        ->check(CLI::IsMember({"arcsine", "brownian"}));
    limit->add_option("--out", la.out_path, "CSV path (default stdout)");
    limit->add_option("--json", la.json_path, "write a JSON summary here");

    VerifyArgs va;
    auto* verify =
        app.add_subcommand("verify", "run an inequality or battery check");
    verify->add_option("--suite", va.suite, "which check to run")
        ->required()
        ->check(CLI::IsMember(
            {"acceptance", "cond", "split", "key", "certificates"}));
    verify->add_option("--n", va.n, "particle count");
    verify->add_option("--y", va.y, "jump height");
    verify->add_option("--delta", va.delta,
                       "time increment (comma list for certificates)");
    verify->add_option("--x0", va.x0, "split point (default from the rule)");
    verify->add_option("--eps", va.eps, "jump threshold (scaled units)");
    verify->add_option("--p", va.p, "moment power");
    verify->add_option("--reps", va.reps, "Monte Carlo replications");
    verify->add_option("--alpha", va.alpha, "comma list of alpha exponents");
    verify->add_option("--beta", va.beta, "comma list of beta exponents");
    verify->add_option("--delta0", va.delta0, "certified delta ceiling");
    verify->add_option("--ratio-cap", va.ratio_cap,
                       "allowed lhs/shape proportionality constant");
    verify->add_option("--out-dir", va.out_dir,
                       "result directory for --suite acceptance");
    verify->add_option("--csv", va.csv_path, "write the report row CSV here");
    verify->add_option("--json", va.json_path, "write a JSON report here");

    ReportArgs ra;
    auto* report = app.add_subcommand(
        "report", "aggregate a result CSV into pass/fail lines");
    report->add_option("--in", ra.in_path, "CSV with a passed column")
        ->required();
    report->add_option("--json", ra.json_path, "write a JSON summary here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (threads)
        setenv("MEDIANBM_THREADS", format_int(*threads).c_str(), 1);

    try {
        if (kernel->parsed()) return run_kernel_eval(ka);
        if (walk->parsed()) return run_walk(wa, seeds);
        if (simulate->parsed()) return run_simulate(sa, seeds);
        if (limit->parsed()) return run_limit_sample(la, seeds);
        if (verify->parsed()) return run_verify(va, seeds);
        if (report->parsed()) return run_report(ra);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;  // unreachable with require_subcommand(1)
}
