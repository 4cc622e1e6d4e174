#include "fockcis/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "fockcis/frame.hpp"
#include "fockcis/geometry.hpp"
#include "fockcis/io.hpp"
#include "fockcis/product.hpp"
#include "fockcis/reference.hpp"
#include "fockcis/weight.hpp"

namespace fockcis {

namespace {

struct CommonConfig {
    std::string weight_spec = "alpha:2";
    double p = 2.0;
    int horizon = 200;
    std::string input;
    std::string output;
    unsigned long seed = 0;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonConfig& cfg, bool needs_input) {
    cmd->add_option("--weight", cfg.weight_spec,
                    "weight spec: alpha:<a> or custom:<table.csv>")
        ->capture_default_str();
    cmd->add_option("--p", cfg.p, "integrability index p (> 0)")
        ->capture_default_str();
    cmd->add_option("--horizon", cfg.horizon, "number of reference slots")
        ->capture_default_str();
    auto* in = cmd->add_option("--input", cfg.input, "input file");
    if (needs_input) in->required();
    cmd->add_option("--output", cfg.output, "output file")->required();
    cmd->add_option("--seed", cfg.seed, "random seed (recorded in outputs)")
        ->capture_default_str();
    cmd->add_option("--jobs", cfg.jobs, "parallelism degree")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

RadialWeight parse_weight(const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string arg =
        colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (kind == "alpha") {
        if (arg.empty())
            throw std::invalid_argument("--weight alpha:<a> needs a value");
        return RadialWeight::alpha_model(std::stod(arg));
    }
    if (kind == "custom") {
        std::ifstream f(arg);
        if (!f)
            throw std::invalid_argument("--weight custom: cannot open " + arg);
        std::vector<WeightTableRow> rows;
        std::string line;
        int lineno = 0;
        bool header = false;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream is(line);
            std::string fld;
            std::vector<double> vals;
            bool bad = false;
            while (std::getline(is, fld, ',')) {
                try {
                    vals.push_back(std::stod(fld));
                } catch (...) {
                    bad = true;
                    break;
                }
            }
            if (bad && !header) {
                header = true;  // header row (r,phi,dphi,d2phi)
                continue;
            }
            if (bad || vals.size() != 4) {
                std::ostringstream os;
                os << arg << ":" << lineno << ": expected r,phi,dphi,d2phi";
                throw std::invalid_argument(os.str());
            }
            rows.push_back({vals[0], vals[1], vals[2], vals[3]});
        }
        return weight_from_table(std::move(rows), "custom:" + arg);
    }
    throw std::invalid_argument("--weight must be alpha:<a> or custom:<path>");
}

SpaceParams parse_p(double p) {
    if (std::isinf(p)) return SpaceParams::infinite();
    return SpaceParams::finite(p);
}

// FNV-1a over the canonical config string.
std::string config_hash(const std::string& canonical) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", h);
    return buf;
}

std::string canonical_config(const std::string& sub, const CommonConfig& cfg,
                             const std::string& extra = "") {
    std::ostringstream os;
    os << "cmd=" << sub << ";weight=" << cfg.weight_spec << ";p=" << cfg.p
       << ";horizon=" << cfg.horizon << ";seed=" << cfg.seed;
    if (!extra.empty()) os << ";" << extra;
    return os.str();
}

void stamp(io::ordered_json& j, const std::string& sub,
           const CommonConfig& cfg, const std::string& extra = "") {
    j["config_hash"] = config_hash(canonical_config(sub, cfg, extra));
    j["horizon"] = cfg.horizon;
    j["version"] = kLibraryVersion;
}

// Regularity gate shared by commands that assume it.
void require_regularity(const RadialWeight& w, const SpaceParams& sp) {
    SpaceParams eff = sp.is_infinite() ? SpaceParams::finite(2.0) : sp;
    RegularityReport rep = audit_regularity(w, eff, {1.0, 1e4}, 64);
    if (!rep.passed())
        throw std::runtime_error("weight fails regularity audit: " +
                                 rep.verdict);
}

// Ordered parallel map over [0, n): results land in index order.
template <typename F>
void parallel_for_ordered(int n, int jobs, F&& body) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

std::vector<double> sigma_norms(const RadialWeight& w, const SpaceParams& sp,
                                const ReferenceSequence& ref) {
    std::vector<double> out(ref.size());
    for (std::size_t n = 0; n < ref.size(); ++n)
        out[n] = log_evaluation_norm(w, sp, LogPoint{ref.y[n], 0.0},
                                     EvalNormMethod::theorem)
                     .log_mag;
    return out;
}

PointSequence reference_points(const ReferenceSequence& ref) {
    std::vector<LogPoint> pts;
    for (double y : ref.y) pts.push_back({y, 0.0});
    return PointSequence::from_points(std::move(pts));
}

int cmd_reference(const CommonConfig& cfg) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    require_regularity(w, sp);
    if (cfg.horizon < 1)
        throw std::invalid_argument("reference: --horizon must be >= 1");
    ReferenceSequence ref = build_reference(w, sp, cfg.horizon - 1);
    io::write_reference_csv(cfg.output, ref, sigma_norms(w, sp, ref));
    NormTable quad = build_norm_table(w, sp, cfg.horizon - 1,
                                      NormMethod::quadrature);
    NormTable asym = build_norm_table(w, sp, cfg.horizon - 1,
                                      NormMethod::asymptotic);
    io::write_norm_table_csv(cfg.output + ".norms.csv", quad, asym);
    return 0;
}

int cmd_audit(const CommonConfig& cfg) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    SpaceParams eff = sp.is_infinite() ? SpaceParams::finite(2.0) : sp;
    RegularityReport rep = audit_regularity(w, eff, {1.0, 1e4}, 64);
    io::ordered_json j = io::regularity_json(rep);
    stamp(j, "audit", cfg);
    io::write_json(cfg.output, j);
    return 0;
}

int cmd_classify(const CommonConfig& cfg, int N_max, double margin) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    require_regularity(w, sp);
    PointSequence g = io::read_sequence_csv(cfg.input);
    ClassifyOptions opts;
    opts.N_max = N_max;
    opts.margin = margin;
    ClassificationReport rep;
    if (sp.is_infinite()) {
        LogPoint star{g.points.back().t + 1.0, 0.0};
        rep = classify_infty(g, star, w, opts);
    } else {
        rep = classify(g, w, sp, opts);
    }
    std::ostringstream extra;
    extra << "N_max=" << N_max << ";margin=" << margin;
    io::ordered_json j = io::classification_json(rep);
    stamp(j, "classify", cfg, extra.str());
    io::write_json(cfg.output, j);
    std::cout << "verdict: " << rep.verdict << "\n";
    return 0;
}

int cmd_density(const CommonConfig& cfg, double R, int samples) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    PointSequence g = io::read_sequence_csv(cfg.input);
    SpaceParams eff = sp.is_infinite() ? SpaceParams::finite(2.0) : sp;
    DensityReport rep = phi_density(g, w, eff, R, samples);
    std::ostringstream extra;
    extra << "R=" << R << ";samples=" << samples;
    io::ordered_json j = io::density_json(rep);
    stamp(j, "density", cfg, extra.str());
    io::write_json(cfg.output, j);
    std::cout << "density: [" << rep.lower << ", " << rep.upper << "]\n";
    return 0;
}

int cmd_interpolate(const CommonConfig& cfg, const std::string& coeff_path) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    require_regularity(w, sp);
    SpaceParams eff = sp.is_infinite() ? SpaceParams::finite(2.0) : sp;

    PointSequence g;
    if (!cfg.input.empty()) {
        g = io::read_sequence_csv(cfg.input);
    } else {
        g = reference_points(build_reference(w, eff, cfg.horizon - 1));
    }
    CoefficientVector v = io::read_coefficients_csv(coeff_path, eff.p);
    CanonicalProduct cp(g);
    Interpolant f(cp, w, eff, v);

    // Node values f(gamma_n) / ||L_{gamma_n}||: the interpolation data.
    std::vector<std::array<double, 2>> vals;
    std::size_t n_report = g.size();
    while (n_report > 0 &&
           g[n_report - 1].t + 10.0 > g.points.back().t)
        --n_report;  // skip nodes whose own evaluation lacks tail margin
    for (std::size_t n = 0; n < n_report; ++n) {
        LogComplex fv = f.eval(g[n]);
        double logL = log_evaluation_norm(w, eff, g[n],
                                          EvalNormMethod::theorem)
                          .log_mag;
        LogComplex scaled =
            fv.is_zero() ? fv : LogComplex::from_log(fv.log_mag - logL,
                                                     fv.phase);
        auto [re, im] = scaled.value();
        vals.push_back({re, im});
    }
    io::write_values_csv(cfg.output, vals);
    return 0;
}

int cmd_gram(const CommonConfig& cfg, std::vector<int> sizes) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    PointSequence g = io::read_sequence_csv(cfg.input);
    if (sizes.empty()) sizes = {10, 20, 40};
    std::sort(sizes.begin(), sizes.end());
    int biggest = sizes.back();
    if (static_cast<std::size_t>(biggest) > g.size())
        throw std::invalid_argument("gram: size exceeds sequence length");
    double t_max = g[biggest - 1].t;
    SpaceParams sp2 = SpaceParams::finite(2.0);
    int n_need =
        static_cast<int>(std::ceil(psi_calculus(w, sp2, t_max).psi1)) + 64;
    KernelTable kt = build_kernel_table(w, n_need);
    std::vector<GramMatrix> gs;
    for (int M : sizes) {
        gs.push_back(gram(kt, g, M));
        std::ostringstream path;
        path << cfg.output << ".M" << M << ".csv";
        io::write_gram_csv(path.str(), gs.back());
    }
    RieszReport rep = riesz_bounds(gs);
    io::ordered_json j = io::riesz_json(rep);
    std::ostringstream extra;
    extra << "sizes=";
    for (int M : sizes) extra << M << ",";
    stamp(j, "gram", cfg, extra.str());
    io::write_json(cfg.output, j);
    std::cout << "condition trend: " << rep.condition_trend << "\n";
    return 0;
}

int cmd_complete(const CommonConfig& cfg, bool report) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    require_regularity(w, sp);
    PointSequence g = io::read_sequence_csv(cfg.input);
    PointSequence out = complete_to_cis(g, w, sp);
    io::write_sequence_csv(cfg.output, out);
    if (report) {
        ClassificationReport rep = classify(out, w, sp);
        io::ordered_json j = io::classification_json(rep);
        stamp(j, "complete", cfg);
        io::write_json(cfg.output + ".report.json", j);
        std::cout << "completed sequence verdict: " << rep.verdict << "\n";
    }
    return 0;
}

int cmd_extract(const CommonConfig& cfg, bool report) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    require_regularity(w, sp);
    PointSequence g = io::read_sequence_csv(cfg.input);
    PointSequence out = extract_cis(g, w, sp);
    io::write_sequence_csv(cfg.output, out);
    if (report) {
        ClassificationReport rep = classify(out, w, sp);
        io::ordered_json j = io::classification_json(rep);
        stamp(j, "extract", cfg);
        io::write_json(cfg.output + ".report.json", j);
        std::cout << "extracted sequence verdict: " << rep.verdict << "\n";
    }
    return 0;
}

struct SweepRow {
    double delta = 0.0;
    int rep = 0;
    std::string verdict;
    double min_delta_N = 0.0;
    std::vector<double> gram_cond;
};

int cmd_sweep(const CommonConfig& cfg, double d_lo, double d_hi, double d_step,
              bool random_phases, int reps, std::vector<int> sizes) {
    RadialWeight w = parse_weight(cfg.weight_spec);
    SpaceParams sp = parse_p(cfg.p);
    require_regularity(w, sp);
    SpaceParams eff = sp.is_infinite() ? SpaceParams::finite(2.0) : sp;

    std::vector<double> deltas;
    for (double d = d_lo; d <= d_hi + 1e-12; d += d_step) deltas.push_back(d);

    ReferenceSequence ref = build_reference(w, eff, cfg.horizon - 1);
    std::sort(sizes.begin(), sizes.end());
    KernelTable kt;
    if (!sizes.empty()) {
        double t_max = ref.y[std::min<std::size_t>(sizes.back(), ref.size()) - 1];
        int n_need =
            static_cast<int>(std::ceil(psi_calculus(w, eff, t_max).psi1)) + 64;
        kt = build_kernel_table(w, n_need);
    }

    int total = static_cast<int>(deltas.size()) * std::max(1, reps);
    std::vector<SweepRow> rows(total);
    parallel_for_ordered(total, cfg.jobs, [&](int idx) {
        int di = idx / std::max(1, reps);
        int rep_i = idx % std::max(1, reps);
        double d = deltas[di];
        // per-task deterministic generator
        std::mt19937_64 rng(cfg.seed * 1000003ull + idx);
        std::uniform_real_distribution<double> uni(-kPi,
                                                   std::nextafter(kPi, 4.0));
        std::vector<LogPoint> pts;
        pts.reserve(ref.size());
        for (double y : ref.y) {
            double theta = random_phases ? uni(rng) : 0.0;
            pts.push_back(LogPoint::from_log(y + d, theta));
        }
        PointSequence g = PointSequence::from_points(std::move(pts));
        ClassificationReport crep = classify(g, w, eff);
        SweepRow row;
        row.delta = d;
        row.rep = rep_i;
        row.verdict = crep.verdict;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [N, v] : crep.delta_N_table) best = std::min(best, v);
        row.min_delta_N = best;
        for (int M : sizes) {
            GramMatrix gm = gram(kt, g, M);
            RieszReport rr = riesz_bounds({gm});
            row.gram_cond.push_back(rr.lower_bounds[0] > 0.0
                                        ? rr.upper_bounds[0] /
                                              rr.lower_bounds[0]
                                        : std::numeric_limits<double>::infinity());
        }
        rows[idx] = std::move(row);
    });

    std::ofstream f(cfg.output);
    if (!f) throw std::runtime_error("cannot open for writing: " + cfg.output);
    f << "# seed=" << cfg.seed << " version=" << kLibraryVersion
      << " config_hash="
      << config_hash(canonical_config("sweep", cfg)) << "\n";
    f << "delta,rep,verdict,min_delta_N";
    for (int M : sizes) f << ",gram_cond_M" << M;
    f << "\n";
    for (const auto& row : rows) {
        f << io::format_double(row.delta) << "," << row.rep << ","
          << row.verdict << "," << io::format_double(row.min_delta_N);
        for (double c : row.gram_cond) f << "," << io::format_double(c);
        f << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"complete-interpolating-sequence toolkit for radial "
                 "Fock-type spaces"};
    app.require_subcommand(1);

    CommonConfig cfg;
    int N_max = 16;
    double margin = 0.02;
    double R = 100.0;
    int samples = 64;
    std::string coeff_path;
    std::vector<int> sizes;
    bool report = true;
    double d_lo = 0.05, d_hi = 0.45, d_step = 0.05;
    bool random_phases = false;
    int reps = 1;

    auto* c_ref = app.add_subcommand("reference",
                                     "emit the reference sequence and norms");
    add_common(c_ref, cfg, false);

    auto* c_audit =
        app.add_subcommand("audit", "audit weight regularity conditions");
    add_common(c_audit, cfg, false);

    auto* c_cls = app.add_subcommand("classify",
                                     "Theorem-1 classification of a sequence");
    add_common(c_cls, cfg, true);
    c_cls->add_option("--N-max", N_max)->capture_default_str();
    c_cls->add_option("--margin", margin)->capture_default_str();

    auto* c_den = app.add_subcommand("density", "phi-density report");
    add_common(c_den, cfg, true);
    c_den->add_option("--R", R)->capture_default_str();
    c_den->add_option("--samples", samples)->capture_default_str();

    auto* c_int = app.add_subcommand("interpolate",
                                     "evaluate the interpolation operator");
    add_common(c_int, cfg, false);
    c_int->add_option("--coeffs", coeff_path, "coefficient CSV (n,re,im)")
        ->required();

    auto* c_gram =
        app.add_subcommand("gram", "normalized-kernel Gram and Riesz trend");
    add_common(c_gram, cfg, true);
    c_gram->add_option("--sizes", sizes, "finite-section sizes");

    auto* c_comp = app.add_subcommand("complete",
                                      "complete a sparse sequence to a CIS");
    add_common(c_comp, cfg, true);
    c_comp->add_flag("--report,!--no-report", report,
                     "also classify the output");

    auto* c_ext = app.add_subcommand("extract",
                                     "extract a CIS from a dense sequence");
    add_common(c_ext, cfg, true);
    c_ext->add_flag("--report,!--no-report", report,
                    "also classify the output");

    auto* c_sweep =
        app.add_subcommand("sweep", "perturbation sweep around the threshold");
    add_common(c_sweep, cfg, false);
    c_sweep->add_option("--delta-lo", d_lo)->capture_default_str();
    c_sweep->add_option("--delta-hi", d_hi)->capture_default_str();
    c_sweep->add_option("--delta-step", d_step)->capture_default_str();
    c_sweep->add_flag("--random-phases", random_phases);
    c_sweep->add_option("--reps", reps)->capture_default_str();
    c_sweep->add_option("--sizes", sizes, "gram sizes per point");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_ref->parsed()) return cmd_reference(cfg);
        if (c_audit->parsed()) return cmd_audit(cfg);
        if (c_cls->parsed()) return cmd_classify(cfg, N_max, margin);
        if (c_den->parsed()) return cmd_density(cfg, R, samples);
        if (c_int->parsed()) return cmd_interpolate(cfg, coeff_path);
        if (c_gram->parsed()) return cmd_gram(cfg, sizes);
        if (c_comp->parsed()) return cmd_complete(cfg, report);
        if (c_ext->parsed()) return cmd_extract(cfg, report);
        if (c_sweep->parsed())
            return cmd_sweep(cfg, d_lo, d_hi, d_step, random_phases, reps,
                             sizes);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 2;
}

}  // namespace fockcis
