// hrcm: batch front door for the hyperbolic random-connection-model toolkit.
//
// Subcommands
//   qd        spherical-kernel table Q_d(r) with the decay-envelope ratio
//   norms     transform/degree operator norms over a list of scales L
//   certify   non-uniqueness certificate: lambda_c upper vs lambda_u lower
//   check     structural/limit assumption checkers with trend evidence
//   sweep     Monte-Carlo percolation sweep over (lambda, L)
//   appendix  scaling counterexamples: vanishing degree, sticky mass ratio
//
// Exit status: 0 success, 1 computation produced vacuous/divergent flags,
// 2 usage or parse error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrcm/model_io.hpp"
#include "hrcm/percolation.hpp"
#include "hrcm/spectral.hpp"
#include "hrcm/table_io.hpp"
#include "hrcm/thresholds.hpp"

namespace {

constexpr const char *kVersion = "hrcm 1.0.0";

using namespace hrcm;

/** Parses "a,b,c" or "lo:hi:n" (n linearly spaced points, inclusive). */
std::vector<double> parse_grid(const std::string &s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        double lo, hi;
        int n;
        char c1, c2;
        std::istringstream in(s);
        if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' ||
            n < 1)
            throw CLI::ValidationError("grid", "expected lo:hi:n");
        for (int i = 0; i < n; i++)
            out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw CLI::ValidationError("grid", "empty grid");
    return out;
}

struct Common {
    std::string model_path, out_path, format = "csv";
    std::uint64_t seed = 0;
};

void add_common(CLI::App *cmd, Common &c, bool needs_model) {
    auto *m = cmd->add_option("--model", c.model_path, "model file");
    if (needs_model) m->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out_path, "output path (default stdout)");
    cmd->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", c.seed, "RNG seed");
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int emit(const Table &t, RunManifest m, const Common &c, bool flagged) {
    m.tool_version = kVersion;
    m.seed = c.seed;
    const std::string text = render_output(t, m, c.format);
    if (c.out_path.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_file(c.out_path, text);
    return flagged ? 1 : 0;
}

std::string fmt(double v) { return format_double(v); }

int cmd_qd(const Common &c, int d, const std::string &grid, double s) {
    const std::vector<double> rs = parse_grid(grid);
    const QdEvaluator qd{Dimension(d)};
    Table t;
    t.header = {"r", "Q_d", "envelope_ratio", "q_ball_real", "q_ball_imag"};
    for (double r : rs) {
        const double q = qd.q_hyp(r);
        // Decay envelope: Q_d(r) <= c'_d (1 v r) e^{-(d-1)r/2}
        const double env = q * std::exp(0.5 * (d - 1) * r) / std::max(1.0, r);
        const std::complex<double> qb = qd.q_ball(std::tanh(0.5 * r), s);
        t.add_row({fmt(r), fmt(q), fmt(env), fmt(qb.real()), fmt(qb.imag())});
    }
    RunManifest m;
    m.subcommand = "qd";
    m.model_digest = "-";
    m.parameters = "d=" + std::to_string(d) + ";grid=" + grid +
                   ";s=" + format_double(s);
    return emit(t, m, c, false);
}

int cmd_norms(const Common &c, const std::string &Ls_str) {
    const AdjacencyModel model = load_model(c.model_path);
    const std::vector<double> Ls = parse_grid(Ls_str);
    Table t;
    t.header = {"L",          "phi_norm_2to2", "degree_norm_2to2",
                "norm_1to1",  "norm_hs",       "ratio",
                "phi_norm_over_L", "diverged"};
    bool flagged = false;
    const QdEvaluator qd(Dimension(model.d));
    for (double L : Ls) {
        const AdjacencyModel mm = model.with_L(L);
        const SpectralReport rep = spectral_report(mm, qd);
        const DegreeMatrix D = degree_matrix(mm);
        const double dn = op_norm_2to2(D.values, mm.marks).value;
        flagged = flagged || rep.diverged;
        t.add_row({fmt(L), fmt(rep.norm_2to2), fmt(dn), fmt(rep.norm_1to1),
                   fmt(rep.norm_hs), fmt(rep.norm_2to2 / dn),
                   fmt(rep.norm_2to2 / L), rep.diverged ? "1" : "0"});
    }
    RunManifest m;
    m.subcommand = "norms";
    m.model_digest = fnv1a_hex(read_file(c.model_path));
    m.parameters = "L=" + Ls_str;
    return emit(t, m, c, flagged);
}

int cmd_certify(const Common &c, const std::string &Ls_str, double theta,
                double eps) {
    const AdjacencyModel model = load_model(c.model_path);
    const std::vector<double> Ls = parse_grid(Ls_str);
    Table t;
    t.header = {"L",        "theta",         "eps",
                "phi_norm", "lambda_u_lower", "lambda_c_upper",
                "gap",      "valid",          "vacuous",
                "trunc_fraction", "triangle_at_lambda_c"};
    bool flagged = false;
    for (double L : Ls) {
        const ThresholdBounds b = certify_nonuniqueness(model, L, theta, eps);
        flagged = flagged || b.vacuous || !b.critical.valid;
        double tri = std::numeric_limits<double>::infinity();
        if (!b.vacuous) {
            const double sm = sq_mass(model.with_L(L));
            tri = triangle_bound(b.spectral.norm_2to2, b.lambda_c_upper, sm);
        }
        t.add_row({fmt(L), fmt(theta), fmt(eps), fmt(b.spectral.norm_2to2),
                   fmt(b.lambda_u_lower), fmt(b.lambda_c_upper),
                   b.gap_certified ? "1" : "0", b.critical.valid ? "1" : "0",
                   b.vacuous ? "1" : "0", fmt(b.critical.trunc_fraction),
                   fmt(tri)});
    }
    RunManifest m;
    m.subcommand = "certify";
    m.model_digest = fnv1a_hex(read_file(c.model_path));
    m.parameters = "L=" + Ls_str + ";theta=" + format_double(theta) +
                   ";eps=" + format_double(eps);
    return emit(t, m, c, flagged);
}

int cmd_check(const Common &c, const std::string &Ls_str) {
    const AdjacencyModel model = load_model(c.model_path);
    const std::vector<double> Ls = parse_grid(Ls_str);
    const AssumptionReport rep = check_assumptions(model, Ls);
    Table t;
    t.header = {"condition", "verdict", "evidence"};
    bool flagged = false;
    for (const AssumptionRow &row : rep.rows) {
        flagged = flagged || row.verdict == Verdict::Undecidable;
        t.add_row({row.name, verdict_name(row.verdict), row.evidence});
    }
    RunManifest m;
    m.subcommand = "check";
    m.model_digest = fnv1a_hex(read_file(c.model_path));
    m.parameters = "L=" + Ls_str;
    return emit(t, m, c, flagged);
}

int cmd_sweep(const Common &c, const std::string &lam_str,
              const std::string &Ls_str, int replicas, double R, double R_core,
              double R_shell, double theta, double eps, bool no_bounds) {
    PercConfig cfg;
    cfg.model = load_model(c.model_path);
    cfg.replicas = replicas;
    cfg.seed = c.seed;
    cfg.R = R;
    cfg.R_core = R_core;
    cfg.R_shell = R_shell;
    const std::vector<double> lams = parse_grid(lam_str);
    const std::vector<double> Ls = parse_grid(Ls_str);
    const std::vector<SweepRow> rows =
        sweep(cfg, lams, Ls, !no_bounds, theta, eps);
    Table t;
    t.header = {"L",       "lambda",       "replicas",
                "mean_points", "mean_degree",  "core_mean_degree",
                "largest_core_fraction", "median_crossing", "mean_crossing",
                "susceptibility", "lambda_u_lower", "lambda_c_upper",
                "error"};
    bool flagged = false;
    for (const SweepRow &r : rows) {
        flagged = flagged || !r.error.empty() || r.bounds_vacuous;
        t.add_row({fmt(r.L), fmt(r.lambda), std::to_string(r.replicas),
                   fmt(r.mean_points), fmt(r.mean_degree),
                   fmt(r.core_mean_degree), fmt(r.mean_largest_core_fraction),
                   fmt(r.median_crossing), fmt(r.mean_crossing),
                   fmt(r.susceptibility), fmt(r.lambda_u_lower),
                   fmt(r.lambda_c_upper), r.error});
    }
    RunManifest m;
    m.subcommand = "sweep";
    m.model_digest = fnv1a_hex(read_file(c.model_path));
    std::ostringstream p;
    p << "lambda=" << lam_str << ";L=" << Ls_str << ";replicas=" << replicas
      << ";R=" << format_double(R) << ";R_core=" << format_double(R_core)
      << ";R_shell=" << format_double(R_shell)
      << ";theta=" << format_double(theta) << ";eps=" << format_double(eps)
      << ";bounds=" << (no_bounds ? 0 : 1);
    m.parameters = p.str();
    return emit(t, m, c, flagged);
}

int cmd_appendix(const Common &c, const std::string &which, int d,
                 const std::string &Ls_str, double lambda, double R_param) {
    const std::vector<double> Ls = parse_grid(Ls_str);
    Table t;
    RunManifest m;
    m.subcommand = "appendix";
    m.model_digest = "-";
    m.parameters = "which=" + which + ";d=" + std::to_string(d) +
                   ";L=" + Ls_str + ";lambda=" + format_double(lambda) +
                   ";R=" + format_double(R_param);
    if (which == "annulus") {
        t.header = {"L", "a_L", "expected_degree"};
        for (double L : Ls) {
            const ScalingFunction s = ScalingFunction::annulus(d, L);
            t.add_row({fmt(L), fmt(s.a_L()),
                       fmt(example_scaling_expected_degree(L, Dimension(d),
                                                           lambda))});
        }
        return emit(t, m, c, false);
    }
    if (which == "many-annuli") {
        t.header = {"L", "a_L", "trunc_total_ratio"};
        AdjacencyModel ma;
        ma.d = d;
        ma.marks = MarkSpace::finite({{1.0, 1.0}});
        ma.base = BaseKind::DyadicAnnuli;
        for (double L : Ls) {
            ma.scaling = ScalingFunction::many_annuli(d, L, R_param);
            const RatioSeries rs = check_ratio_condition(ma, R_param, {L});
            t.add_row({fmt(L), fmt(ma.scaling.a_L()), fmt(rs.ratio[0])});
        }
        return emit(t, m, c, false);
    }
    throw CLI::ValidationError("--which", "expected annulus or many-annuli");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"hyperbolic random-connection-model toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common c_qd, c_norms, c_cert, c_check, c_sweep, c_app;
    int qd_d = 3;
    std::string qd_grid = "0:30:61";
    double qd_s = 0.0;
    auto *qd = app.add_subcommand("qd", "spherical kernel table");
    add_common(qd, c_qd, false);
    qd->add_option("--d", qd_d, "dimension")->check(CLI::Range(2, 8));
    qd->add_option("--grid", qd_grid, "r grid: list or lo:hi:n");
    qd->add_option("--s", qd_s, "spectral parameter");

    std::string norms_L = "1";
    auto *norms = app.add_subcommand("norms", "operator norms over L");
    add_common(norms, c_norms, true);
    norms->add_option("--grid", norms_L, "L grid");

    std::string cert_L = "1";
    double cert_theta = M_PI_2, cert_eps = M_PI / 12.0;
    auto *cert = app.add_subcommand("certify", "non-uniqueness certificate");
    add_common(cert, c_cert, true);
    cert->add_option("--grid", cert_L, "L grid");
    cert->add_option("--theta", cert_theta, "cone half-angle");
    cert->add_option("--eps", cert_eps, "cap angle");

    std::string check_L = "1,10,100";
    auto *chk = app.add_subcommand("check", "assumption checkers");
    add_common(chk, c_check, true);
    chk->add_option("--grid", check_L, "L grid for trend evidence");

    std::string sw_lam = "1", sw_L = "1";
    int sw_replicas = 8;
    double sw_R = 8.0, sw_core = 4.0, sw_shell = 6.5;
    double sw_theta = M_PI_2, sw_eps = M_PI / 12.0;
    bool sw_nobounds = false;
    auto *sw = app.add_subcommand("sweep", "Monte-Carlo percolation sweep");
    add_common(sw, c_sweep, true);
    sw->add_option("--grid", sw_lam, "lambda grid");
    sw->add_option("--Ls", sw_L, "L grid");
    sw->add_option("--replicas", sw_replicas, "replicas per grid point")
        ->check(CLI::PositiveNumber);
    sw->add_option("--R", sw_R, "ball radius");
    sw->add_option("--R-core", sw_core, "core radius");
    sw->add_option("--R-shell", sw_shell, "shell start radius");
    sw->add_option("--theta", sw_theta, "cone half-angle for bounds");
    sw->add_option("--eps", sw_eps, "cap angle for bounds");
    sw->add_flag("--no-bounds", sw_nobounds, "skip threshold-bound columns");

    std::string app_which = "annulus", app_L = "2,4,8,16";
    int app_d = 3;
    double app_lambda = 1.0, app_R = 0.5;
    auto *ap = app.add_subcommand("appendix", "scaling counterexamples");
    add_common(ap, c_app, false);
    ap->add_option("--which", app_which, "annulus or many-annuli");
    ap->add_option("--d", app_d, "dimension")->check(CLI::Range(2, 8));
    ap->add_option("--grid", app_L, "L grid");
    ap->add_option("--lambda", app_lambda, "intensity (annulus)");
    ap->add_option("--R", app_R, "ladder base radius (many-annuli)");

    try {
        app.parse(argc, argv);
        if (qd->parsed()) return cmd_qd(c_qd, qd_d, qd_grid, qd_s);
        if (norms->parsed()) return cmd_norms(c_norms, norms_L);
        if (cert->parsed())
            return cmd_certify(c_cert, cert_L, cert_theta, cert_eps);
        if (chk->parsed()) return cmd_check(c_check, check_L);
        if (sw->parsed())
            return cmd_sweep(c_sweep, sw_lam, sw_L, sw_replicas, sw_R, sw_core,
                             sw_shell, sw_theta, sw_eps, sw_nobounds);
        if (ap->parsed())
            return cmd_appendix(c_app, app_which, app_d, app_L, app_lambda,
                                app_R);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
