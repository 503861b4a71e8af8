#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"
#include "erspec/forks.hpp"
#include "erspec/graph.hpp"
#include "erspec/local_law.hpp"
#include "erspec/localization.hpp"
#include "erspec/measures.hpp"
#include "erspec/profiles.hpp"
#include "erspec/pruning.hpp"
#include "erspec/spectra.hpp"

#ifndef ERSPEC_VERSION
#define ERSPEC_VERSION "0.0.0"
#endif

namespace erspec::harness {

using nlohmann::json;

namespace {

struct KindInfo {
    std::string name;
    bool needs_graph;
    std::string help;
};

const std::vector<KindInfo>& kind_table() {
    static const std::vector<KindInfo> table = {
        {"scatter", true,
         "Eigenvalue versus sup-norm scatter of A/sqrt(d) on the giant component of G(N, d/N).\n"
         "Checks the phase diagram of eigenvector localization: a delocalized bulk in (-2, 2), a\n"
         "Perron outlier near sqrt(d), and semilocalized eigenvectors beyond +-2 when b < b_*.\n"
         "CSV columns: eigenvalue,inf_norm."},
        {"rigidity", true,
         "Eigenvalue rigidity outside [-2 - o(1), 2 + o(1)]: the i-th nontrivial eigenvalue above\n"
         "2 + xi^{1/2} sits next to Lambda(alpha_sigma(i)) = alpha/sqrt(alpha - 1) for the i-th\n"
         "largest normalized degree, and symmetrically below -2.\n"
         "CSV columns: rank,eigenvalue,predicted,abs_gap."},
        {"localize", true,
         "Semilocalization of eigenvectors with |lambda| > 2: mass concentrates on the resonant\n"
         "vertices {x : |Lambda(alpha_x) - |lambda|| <= delta} and overlaps the exponentially\n"
         "decaying radial profiles built on pruned balls, with center mass close to\n"
         "sqrt(lambda^2 - 4)/(|lambda| + sqrt(lambda^2 - 4)).\n"
         "CSV columns: eigenvalue,gamma,overlap,center_mass,predicted_center_mass."},
        {"prune-verify", true,
         "Pruned graph construction: for V_tau = {alpha_x >= tau} the pruned balls of radius 2 r_star\n"
         "are disjoint trees, removed edges touch V_tau, spheres only shrink, and distinct V_tau\n"
         "vertices are at distance > 4 r_star.\n"
         "CSV columns: seed,tau,r_star,v_tau,removed,separated,balls_are_trees,cuts_touch_v_tau,\n"
         "spheres_nested,max_removed_degree,sphere_loss."},
        {"local-law", true,
         "Local law for the Green function G(z) = (M - z)^{-1}: G_xx(z) is close to\n"
         "m_{beta_x}(z) = -1/(z + beta_x m(z)) uniformly in x, with error compared against the\n"
         "rate (log N / d^2)^{1/3}. Also reports the Ward identity, typical vertices and the\n"
         "self-consistent equation residuals.\n"
         "CSV columns: re_z,im_z,max_diag_err,avg_err,rate_ref,d,N,seed."},
        {"forks", true,
         "Tuning forks: two stars with D leaves each hanging from a common base vertex produce exact\n"
         "eigenvalues +-sqrt(D/d) anywhere in the spectrum, so localized eigenvectors exist inside\n"
         "the bulk. Counts are compared with the first-moment prediction.\n"
         "CSV columns: seed,N,d,D,count,expected."},
        {"measures", false,
         "Limiting spectral measure mu_alpha at a vertex of normalized degree alpha: a density on\n"
         "(-2, 2) plus atoms at +-Lambda(alpha) when alpha > 2, whose Stieltjes transform is\n"
         "m_alpha(z) = -1/(z + alpha m(z)).\n"
         "CSV columns: alpha,u,g_alpha."},
        {"phase", false,
         "Localization exponent rho_b(lambda) = max(0, 1 - b h(Lambda^{-1}(|lambda|))) with\n"
         "h(a) = a log a - a + 1: eigenvectors at energy lambda have sup-norm about N^{-rho/2}. The\n"
         "semilocalized phase is empty for b >= b_* = 1/(2 log 2 - 1).\n"
         "CSV columns: b,lambda,rho_b."},
        {"instability", false,
         "Instability of the self-consistent equation on trees: on the completed d-regular tree of\n"
         "depth r the inverse of (alpha - S) has infinity-norm at least of order r/log r for\n"
         "|alpha| = 1, so no uniform stability holds for sup-norm errors.\n"
         "CSV columns: d,r,phase_re,phase_im,c1,mu,u_inf,residual_inf,lower_bound."},
        {"blocknorms", true,
         "Block-diagonal approximation of H by H_hat: norms of H - H^tau, H^tau - H_hat, the\n"
         "complement block of H^tau and EA - chi EA chi are all small, which transfers spectral\n"
         "information from the explicit profiles to H.\n"
         "CSV columns: tau,r_star,seed,norm_h_htau,norm_htau_hhat,norm_complement_block,norm_ea_cut."},
    };
    return table;
}

const KindInfo& kind_info(const std::string& kind) {
    for (const auto& k : kind_table())
        if (k.name == kind) return k;
    std::string valid;
    for (const auto& k : kind_table()) valid += (valid.empty() ? "" : ", ") + k.name;
    throw ConfigError("config.kind: unknown kind '" + kind + "' (valid kinds: " + valid + ")");
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + ": expected a finite number");
    return v;
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return j.get<int>();
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void require_nonempty(const auto& v, const std::string& path) {
    if (v.empty()) throw ConfigError(path + ": must not be empty");
}

std::vector<double> default_eta_grid(int n, double kappa) {
    double hi = 3.0;
    double lo = std::pow(static_cast<double>(n), -1.0 + kappa);
    std::vector<double> g;
    const int points = 6;
    for (int i = 0; i < points; ++i) g.push_back(hi * std::pow(lo / hi, static_cast<double>(i) / (points - 1)));
    return g;
}

std::vector<double> linspace(double a, double b, double step) {
    std::vector<double> v;
    int count = static_cast<int>(std::floor((b - a) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) v.push_back(std::round((a + i * step) * 1e9) / 1e9);
    return v;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
    return s + "\n";
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& k : kind_table()) v.push_back(k.name);
        return v;
    }();
    return names;
}

const std::string& kind_help(const std::string& kind) { return kind_info(kind).help; }

double ExperimentConfig::effective_d() const {
    if (d) return *d;
    if (b) return *b * std::log(static_cast<double>(n));
    if (kind == "instability") return 32;
    throw ConfigError("config: one of b or d is required for kind '" + kind + "'");
}

int ExperimentConfig::effective_r_star() const {
    if (r_star) return *r_star;
    return std::max(1, erspec::r_star(n, r_star_c));
}

json ExperimentConfig::to_json() const {
    json j;
    j["kind"] = kind;
    j["n"] = n;
    j["b"] = b ? json(*b) : json(nullptr);
    j["d"] = d ? json(*d) : json(nullptr);
    j["seeds"] = seeds;
    j["tau"] = tau;
    j["delta"] = delta ? json(*delta) : json(nullptr);
    j["r_star_c"] = r_star_c;
    j["r_star"] = r_star ? json(*r_star) : json(nullptr);
    j["kappa"] = kappa;
    j["eta_grid"] = eta_grid;
    json zs = json::array();
    for (auto z : z_grid) zs.push_back({z.real(), z.imag()});
    j["z_grid"] = zs;
    j["alpha_grid"] = alpha_grid;
    j["b_grid"] = b_grid;
    j["lambda_grid"] = lambda_grid;
    j["r_grid"] = r_grid;
    j["phase_angles"] = phase_angles;
    j["matrix"] = matrix;
    j["typical_a"] = typical_a;
    j["sce"] = sce;
    j["extremal_k"] = extremal_k;
    j["dense_max"] = dense_max;
    j["density_points"] = density_points;
    j["out"] = out;
    return j;
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    static const std::set<std::string> known = {
        "kind", "n", "b", "d", "seeds", "tau", "delta", "r_star_c", "r_star", "kappa", "eta_grid", "z_grid",
        "alpha_grid", "b_grid", "lambda_grid", "r_grid", "phase_angles", "matrix", "typical_a", "sce",
        "extremal_k", "dense_max", "density_points", "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("config." + it.key() + ": unknown field");

    ExperimentConfig c;
    if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("config.kind: required string");
    c.kind = j["kind"].get<std::string>();
    const KindInfo& info = kind_info(c.kind);

    auto has = [&](const char* k) { return j.contains(k) && !j[k].is_null(); };
    if (has("n")) c.n = get_int(j["n"], "config.n");
    if (c.n < 2) throw ConfigError("config.n: must be at least 2");
    if (has("b") && has("d")) throw ConfigError("config: set exactly one of b and d, not both");
    if (has("b")) {
        c.b = get_number(j["b"], "config.b");
        if (!(*c.b > 0)) throw ConfigError("config.b: must be positive");
    }
    if (has("d")) {
        c.d = get_number(j["d"], "config.d");
        if (!(*c.d > 0)) throw ConfigError("config.d: must be positive");
    }
    if (info.needs_graph && !c.b && !c.d) throw ConfigError("config: one of b or d is required for kind '" + c.kind + "'");
    if (has("seeds")) {
        const json& s = j["seeds"];
        if (!s.is_array()) throw ConfigError("config.seeds: expected an array of unsigned integers");
        c.seeds.clear();
        for (size_t i = 0; i < s.size(); ++i) {
            if (!s[i].is_number_unsigned() && !(s[i].is_number_integer() && s[i].get<int64_t>() >= 0))
                throw ConfigError("config.seeds[" + std::to_string(i) + "]: expected an unsigned integer");
            c.seeds.push_back(s[i].get<uint64_t>());
        }
        require_nonempty(c.seeds, "config.seeds");
    }
    if (has("tau")) c.tau = get_number(j["tau"], "config.tau");
    if (!(c.tau > 1 && c.tau <= 2)) throw ConfigError("config.tau: must lie in (1, 2]");
    if (has("delta")) {
        c.delta = get_number(j["delta"], "config.delta");
        if (!(*c.delta > 0)) throw ConfigError("config.delta: must be positive");
    }
    if (has("r_star_c")) c.r_star_c = get_number(j["r_star_c"], "config.r_star_c");
    if (!(c.r_star_c > 0)) throw ConfigError("config.r_star_c: must be positive");
    if (has("r_star")) {
        c.r_star = get_int(j["r_star"], "config.r_star");
        if (*c.r_star < 1) throw ConfigError("config.r_star: must be at least 1");
    }
    if (has("kappa")) c.kappa = get_number(j["kappa"], "config.kappa");
    if (!(c.kappa > 0 && c.kappa < 1)) throw ConfigError("config.kappa: must lie in (0, 1)");
    if (has("eta_grid")) {
        c.eta_grid = get_numbers(j["eta_grid"], "config.eta_grid");
        require_nonempty(c.eta_grid, "config.eta_grid");
        for (size_t i = 0; i < c.eta_grid.size(); ++i)
            if (!(c.eta_grid[i] > 0)) throw ConfigError("config.eta_grid[" + std::to_string(i) + "]: must be positive");
    } else {
        c.eta_grid = default_eta_grid(c.n, c.kappa);
    }
    if (has("z_grid")) {
        const json& z = j["z_grid"];
        if (!z.is_array()) throw ConfigError("config.z_grid: expected an array of [re, im] pairs");
        for (size_t i = 0; i < z.size(); ++i) {
            std::string path = "config.z_grid[" + std::to_string(i) + "]";
            if (!z[i].is_array() || z[i].size() != 2) throw ConfigError(path + ": expected [re, im]");
            double re = get_number(z[i][0], path + "[0]");
            double im = get_number(z[i][1], path + "[1]");
            if (!(im > 0)) throw ConfigError(path + "[1]: imaginary part must be positive");
            c.z_grid.emplace_back(re, im);
        }
        require_nonempty(c.z_grid, "config.z_grid");
    } else {
        for (double eta : c.eta_grid) c.z_grid.emplace_back(1.0, eta);
    }
    if (has("alpha_grid")) {
        c.alpha_grid = get_numbers(j["alpha_grid"], "config.alpha_grid");
        require_nonempty(c.alpha_grid, "config.alpha_grid");
        for (size_t i = 0; i < c.alpha_grid.size(); ++i)
            if (c.alpha_grid[i] < 0) throw ConfigError("config.alpha_grid[" + std::to_string(i) + "]: must be >= 0");
    }
    if (has("b_grid")) {
        c.b_grid = get_numbers(j["b_grid"], "config.b_grid");
        require_nonempty(c.b_grid, "config.b_grid");
    } else if (c.b) {
        c.b_grid = {*c.b};
    } else {
        c.b_grid = linspace(0.3, 3.0, 0.1);
    }
    for (size_t i = 0; i < c.b_grid.size(); ++i)
        if (!(c.b_grid[i] > 0)) throw ConfigError("config.b_grid[" + std::to_string(i) + "]: must be positive");
    if (has("lambda_grid")) {
        c.lambda_grid = get_numbers(j["lambda_grid"], "config.lambda_grid");
        require_nonempty(c.lambda_grid, "config.lambda_grid");
    } else {
        c.lambda_grid = linspace(2.0, 4.0, 0.05);
    }
    if (has("r_grid")) {
        const json& r = j["r_grid"];
        if (!r.is_array()) throw ConfigError("config.r_grid: expected an array of integers");
        c.r_grid.clear();
        for (size_t i = 0; i < r.size(); ++i) {
            int v = get_int(r[i], "config.r_grid[" + std::to_string(i) + "]");
            if (v < 2) throw ConfigError("config.r_grid[" + std::to_string(i) + "]: must be at least 2");
            c.r_grid.push_back(v);
        }
        require_nonempty(c.r_grid, "config.r_grid");
    }
    if (has("phase_angles")) {
        c.phase_angles = get_numbers(j["phase_angles"], "config.phase_angles");
        require_nonempty(c.phase_angles, "config.phase_angles");
    }
    if (has("matrix")) {
        if (!j["matrix"].is_string()) throw ConfigError("config.matrix: expected a string");
        c.matrix = j["matrix"].get<std::string>();
        try {
            parse_matrix_kind(c.matrix);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config.matrix: ") + e.what());
        }
    }
    if (has("typical_a")) c.typical_a = get_number(j["typical_a"], "config.typical_a");
    if (has("sce")) {
        if (!j["sce"].is_boolean()) throw ConfigError("config.sce: expected a boolean");
        c.sce = j["sce"].get<bool>();
    }
    if (has("extremal_k")) c.extremal_k = get_int(j["extremal_k"], "config.extremal_k");
    if (c.extremal_k < 0) throw ConfigError("config.extremal_k: must be >= 0");
    if (has("dense_max")) c.dense_max = get_int(j["dense_max"], "config.dense_max");
    if (has("density_points")) c.density_points = get_int(j["density_points"], "config.density_points");
    if (c.density_points < 2) throw ConfigError("config.density_points: must be at least 2");
    if (has("out")) {
        if (!j["out"].is_string()) throw ConfigError("config.out: expected a string");
        c.out = j["out"].get<std::string>();
    }
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string run_id(const ExperimentConfig& cfg, uint64_t seed) {
    json j = cfg.to_json();
    j.erase("out");
    j.erase("seeds");
    std::string text = j.dump() + "#" + std::to_string(seed);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void run_scatter(const ExperimentConfig& cfg, uint64_t seed, RunRecord& rec) {
    double d = cfg.effective_d();
    GraphSample g = generate_er(cfg.n, d, seed);
    ComponentCensus census = components_census(g.graph);
    const auto& giant = census.components[census.giant_index];
    ScaledMatrix m = adjacency_over_sqrt_d(g.graph.induced(giant), d);
    EigenDecomposition e;
    if (static_cast<int>(giant.size()) <= cfg.dense_max) {
        e = eig_sym(m.dense(), true);
    } else {
        int k = cfg.extremal_k > 0 ? cfg.extremal_k : 200;
        e = eig_extremal(as_operator(m), std::min(k, static_cast<int>(giant.size())));
    }
    auto rows = scatter_rows(e);
    std::ostringstream os;
    write_scatter_csv(os, rows);
    rec.csv = os.str();
    std::vector<double> bulk;
    double edge = 0;
    for (const auto& r : rows) {
        if (r.eigenvalue >= 0.5 && r.eigenvalue <= 1.5) bulk.push_back(r.inf_norm);
        if (std::abs(r.eigenvalue) > 2.05) edge = std::max(edge, r.inf_norm);
    }
    rec.lines.push_back({{"giant_size", giant.size()},
                         {"d", d},
                         {"method", e.method == EigMethod::dense ? "dense" : "lanczos_extremal"},
                         {"perron", rows.empty() ? 0.0 : rows.front().eigenvalue},
                         {"bulk_median_inf_norm", finite_or_null(median(bulk))},
                         {"edge_max_inf_norm", edge}});
}

EigenDecomposition extremal_covering(const LinearOperator& op, int k, double threshold) {
    // Grow k until the window reaches below the threshold at both ends.
    for (;;) {
        k = std::min(k, op.n);
        EigenDecomposition e = eig_extremal(op, k);
        bool top_ok = false, bottom_ok = false;
        for (size_t i = 0; i < e.values.size(); ++i) {
            if (e.rank[i] == k && e.values[i] <= threshold) top_ok = true;
            if (e.rank[i] == op.n - k + 1 && e.values[i] >= -threshold) bottom_ok = true;
        }
        if ((top_ok && bottom_ok) || 2 * k >= op.n) return e;
        k *= 2;
    }
}

void run_rigidity(const ExperimentConfig& cfg, uint64_t seed, RunRecord& rec) {
    double d = cfg.effective_d();
    GraphSample g = generate_er(cfg.n, d, seed);
    DegreeProfile profile = normalized_degrees(g);
    double x = xi(cfg.n, d);
    double threshold = 2.0 + std::sqrt(x);
    int u = 0;
    for (double a : profile.alpha)
        if (a >= 2 && lambda_of_alpha(a) >= threshold) ++u;
    ScaledMatrix m = build_scaled_matrix(g, MatrixKind::adjacency_over_sqrt_d);
    int k = cfg.extremal_k > 0 ? cfg.extremal_k : std::max(u + 3, 8);
    EigenDecomposition e = extremal_covering(as_operator(m), k, threshold);
    RigidityReport rep = rigidity_pairing(e, profile, x);
    std::ostringstream os;
    write_rigidity_csv(os, rep);
    rec.csv = os.str();
    std::vector<double> gaps, scaled;
    for (const auto& p : rep.pairs) {
        gaps.push_back(p.gap);
        double ref = x + xi_u(cfg.n, d, std::abs(p.predicted) - 2.0);
        scaled.push_back(p.gap / ref);
    }
    rec.lines.push_back({{"d", d},
                         {"xi", x},
                         {"threshold", threshold},
                         {"u_size", rep.u_set.size()},
                         {"count_above", rep.count_above},
                         {"bulk_max", rep.bulk_max},
                         {"median_gap", finite_or_null(median(gaps))},
                         {"median_gap_constant", finite_or_null(median(scaled))}});
}

void run_prune_verify(const ExperimentConfig& cfg, uint64_t seed, RunRecord& rec) {
    double d = cfg.effective_d();
    int r = cfg.effective_r_star();
    GraphSample g = generate_er(cfg.n, d, seed);
    PrunedGraph p = prune(g, cfg.tau, r);
    PropertyReport rep = verify_pruning(p);
    auto yn = [](bool b) { return std::string(b ? "1" : "0"); };
    rec.csv = "seed,tau,r_star,v_tau,removed,separated,balls_are_trees,cuts_touch_v_tau,spheres_nested,"
              "max_removed_degree,sphere_loss\n";
    rec.csv += csv_row({std::to_string(seed), fmt(cfg.tau), std::to_string(r), std::to_string(rep.v_tau_size),
                        std::to_string(rep.removed), yn(rep.separated), yn(rep.balls_are_trees),
                        yn(rep.cuts_touch_v_tau), yn(rep.spheres_nested), std::to_string(rep.max_removed_degree),
                        fmt(rep.sphere_loss)});
    rec.lines.push_back({{"d", d}, {"r_star", r}, {"all_properties", rep.all()}});
}

PrunedOperators pruned_operators(const ExperimentConfig& cfg, uint64_t seed, GraphSample& g) {
    double d = cfg.effective_d();
    g = generate_er(cfg.n, d, seed);
    PrunedGraph p = prune(g, cfg.tau, cfg.effective_r_star());
    return build_pruned_operators(g, p, xi(cfg.n, d));
}

void run_localize(const ExperimentConfig& cfg, uint64_t seed, RunRecord& rec) {
    GraphSample g;
    PrunedOperators ops = pruned_operators(cfg, seed, g);
    DegreeProfile profile = normalized_degrees(g);
    ScaledMatrix m = build_scaled_matrix(g, MatrixKind::adjacency_over_sqrt_d);
    int k = cfg.extremal_k > 0 ? cfg.extremal_k : std::max(10, static_cast<int>(ops.centers.size()) + 5);
    EigenDecomposition e = eig_extremal(as_operator(m), std::min(k, cfg.n));
    std::vector<LocalizationReport> rows;
    for (size_t i = 0; i < e.values.size(); ++i) {
        double lambda = e.values[i];
        if (e.rank[i] == 1 || std::abs(lambda) <= 2.0 + 1e-9) continue;
        double delta = cfg.delta ? std::min(*cfg.delta, std::abs(lambda) - 2.0) : default_delta(std::abs(lambda));
        ResonantSet res = resonant_set(profile, std::abs(lambda), delta);
        rows.push_back(overlap_report(e.vectors.col(static_cast<Eigen::Index>(i)), lambda, res, ops.profiles));
    }
    std::ostringstream os;
    write_localization_csv(os, rows);
    rec.csv = os.str();
    rec.lines.push_back({{"d", ops.d},
                         {"r_star", ops.r_star},
                         {"centers", ops.centers.size()},
                         {"degenerate", ops.degenerate.size()},
                         {"reported", rows.size()}});
}

void run_blocknorms(const ExperimentConfig& cfg, uint64_t seed, RunRecord& rec) {
    GraphSample g;
    PrunedOperators ops = pruned_operators(cfg, seed, g);
    ApproximationReport rep = approximation_report(ops);
    rec.csv = "tau,r_star,seed,norm_h_htau,norm_htau_hhat,norm_complement_block,norm_ea_cut\n";
    rec.csv += csv_row({fmt(rep.tau), std::to_string(rep.r_star), std::to_string(seed), fmt(rep.norm_h_htau),
                        fmt(rep.norm_htau_hhat), fmt(rep.norm_complement_block), fmt(rep.norm_ea_cut)});
    rec.lines.push_back({{"norm_h_htau", rep.norm_h_htau},
                         {"norm_htau_hhat", rep.norm_htau_hhat},
                         {"norm_complement_block", rep.norm_complement_block},
                         {"norm_ea_cut", rep.norm_ea_cut},
                         {"tau", rep.tau},
                         {"r_star", rep.r_star},
                         {"seed", seed},
                         {"d", ops.d},
                         {"centers", ops.centers.size()},
                         {"degenerate", ops.degenerate.size()}});
}

void run_local_law(const ExperimentConfig& cfg, uint64_t seed, RunRecord& rec) {
    double d = cfg.effective_d();
    GraphSample g = generate_er(cfg.n, d, seed);
    ScaledMatrix m = build_scaled_matrix(g, parse_matrix_kind(cfg.matrix), seed ^ 0x5167ULL);
    ScaledMatrix h = build_scaled_matrix(g, MatrixKind::centered_H);
    std::vector<double> beta = row_mass(h);
    Eigen::MatrixXd dense = m.dense();
    std::vector<LocalLawRow> rows;
    for (auto z : cfg.z_grid) {
        GreenFunction gf = green_function(dense, z, true);
        LocalLawReport rep = local_law_report(gf, beta, d);
        rows.push_back({z, rep, d, cfg.n, seed});
        TypicalityReport typ = typicality(h, gf, cfg.typical_a);
        json line = {{"re_z", z.real()},
                     {"im_z", z.imag()},
                     {"ward_residual", ward_residual(gf)},
                     {"max_offdiag", rep.max_offdiag},
                     {"typical_fraction", static_cast<double>(typ.typical.size()) / cfg.n},
                     {"phi_threshold", typ.threshold}};
        if (cfg.sce) {
            SceResidual sr = sce_residual(m, h, gf, typ.typical);
            line["max_y"] = sr.max_y;
            line["max_schur_gap"] = sr.max_schur_gap;
            line["max_epsilon"] = sr.max_epsilon;
            line["stability_constant"] = sr.stability_constant;
        }
        rec.lines.push_back(line);
    }
    std::ostringstream os;
    write_local_law_csv(os, rows);
    rec.csv = os.str();
}

void run_forks(const ExperimentConfig& cfg, uint64_t seed, RunRecord& rec) {
    double d = cfg.effective_d();
    GraphSample g = generate_er(cfg.n, d, seed);
    ComponentCensus census = components_census(g.graph);
    auto forks = find_forks(g, census);
    std::map<int, long> by_degree;
    double worst = 0;
    for (const auto& f : forks) {
        ++by_degree[f.degree];
        for (const auto& pair : fork_eigenpairs(f, g)) {
            double res = fork_residual(pair, g);
            worst = std::max(worst, res);
            rec.lines.push_back({{"base", f.base},
                                 {"hubs", {f.hubs[0], f.hubs[1]}},
                                 {"D", f.degree},
                                 {"eigenvalue", pair.eigenvalue},
                                 {"residual", res}});
        }
    }
    rec.csv = "seed,N,d,D,count,expected\n";
    int max_d = by_degree.empty() ? 0 : by_degree.rbegin()->first;
    for (int D = 0; D <= max_d + 1; ++D) {
        long count = by_degree.count(D) ? by_degree[D] : 0;
        rec.csv += csv_row({std::to_string(seed), std::to_string(cfg.n), fmt(d), std::to_string(D),
                            std::to_string(count), fmt(expected_fork_count(cfg.n, d, D))});
        rec.lines.push_back({{"D", D},
                             {"count", count},
                             {"expected", expected_fork_count(cfg.n, d, D)},
                             {"expected_exact", expected_fork_count_exact(cfg.n, d, D)}});
    }
    rec.lines.push_back({{"forks", forks.size()}, {"max_residual", worst}});
}

void run_measures(const ExperimentConfig& cfg, RunRecord& rec) {
    rec.csv = "alpha,u,g_alpha\n";
    for (double a : cfg.alpha_grid) {
        MuAlpha mu = mu_alpha(a);
        std::ostringstream os;
        write_density_csv(os, mu, cfg.density_points);
        std::istringstream is(os.str());
        std::string line;
        std::getline(is, line);
        while (std::getline(is, line)) rec.csv += fmt(a) + "," + line + "\n";
        double worst = 0;
        for (double re : {-1.5, 0.0, 1.0})
            for (double im : {0.05, 0.5, 1.0}) {
                cplx z(re, im);
                worst = std::max(worst, std::abs(stieltjes_quadrature(mu, z).value - m_alpha(a, z)));
            }
        rec.lines.push_back({{"alpha", a},
                             {"continuous_mass", mu.continuous_mass()},
                             {"atom_mass", mu.atom_mass},
                             {"atom_location", mu.atom_location},
                             {"total_mass", mu.total_mass()},
                             {"max_stieltjes_error", worst}});
    }
}

void run_phase(const ExperimentConfig& cfg, RunRecord& rec) {
    rec.csv = "b,lambda,rho_b\n";
    for (double b : cfg.b_grid) {
        for (double l : cfg.lambda_grid) rec.csv += csv_row({fmt(b), fmt(l), fmt(rho(b, l))});
        auto am = alpha_max(b);
        auto lm = lambda_max(b);
        rec.lines.push_back({{"b", b},
                             {"semilocalized", am.has_value()},
                             {"alpha_max", am ? json(*am) : json(nullptr)},
                             {"lambda_max", lm ? json(*lm) : json(nullptr)}});
    }
}

void run_instability(const ExperimentConfig& cfg, RunRecord& rec) {
    int d = static_cast<int>(std::lround(cfg.effective_d()));
    rec.csv = "d,r,phase_re,phase_im,c1,mu,u_inf,residual_inf,lower_bound\n";
    for (double angle : cfg.phase_angles) {
        cplx phase = std::polar(1.0, angle);
        double sxy = 0, sxx = 0;
        for (int r : cfg.r_grid) {
            InstabilityRecord ir = instability_probe(d, r, phase);
            rec.csv += csv_row({std::to_string(d), std::to_string(r), fmt(phase.real()), fmt(phase.imag()),
                                fmt(ir.c1), fmt(ir.mu), fmt(ir.u_inf), fmt(ir.residual_inf), fmt(ir.lower_bound)});
            double x = r / std::log(static_cast<double>(r));
            sxy += x * ir.lower_bound;
            sxx += x * x;
        }
        rec.lines.push_back({{"d", d}, {"phase_angle", angle}, {"fitted_c", sxy / sxx}});
    }
}

template <class E>
[[noreturn]] void rethrow_with(const E& e, const std::string& ctx) {
    throw E(ctx + e.what());
}

RunRecord run_one(const ExperimentConfig& cfg, uint64_t seed) {
    RunRecord rec;
    rec.kind = cfg.kind;
    rec.seed = seed;
    rec.run_id = run_id(cfg, seed);
    rec.config = cfg.to_json();
    rec.config["seeds"] = {seed};
    rec.config.erase("out");
    rec.version = ERSPEC_VERSION;
    auto t0 = std::chrono::steady_clock::now();
    std::string ctx = cfg.kind + " seed " + std::to_string(seed) + ": ";
    try {
        const std::string& k = cfg.kind;
        if (k == "scatter") run_scatter(cfg, seed, rec);
        else if (k == "rigidity") run_rigidity(cfg, seed, rec);
        else if (k == "localize") run_localize(cfg, seed, rec);
        else if (k == "prune-verify") run_prune_verify(cfg, seed, rec);
        else if (k == "local-law") run_local_law(cfg, seed, rec);
        else if (k == "forks") run_forks(cfg, seed, rec);
        else if (k == "measures") run_measures(cfg, rec);
        else if (k == "phase") run_phase(cfg, rec);
        else if (k == "instability") run_instability(cfg, rec);
        else if (k == "blocknorms") run_blocknorms(cfg, seed, rec);
        else kind_info(k);
    } catch (const ConfigError& e) {
        rethrow_with(e, ctx);
    } catch (const ParameterError& e) {
        rethrow_with(e, ctx);
    } catch (const DomainError& e) {
        rethrow_with(e, ctx);
    } catch (const NumericError& e) {
        rethrow_with(e, ctx);
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, int threads) {
    kind_info(cfg.kind);
    std::vector<uint64_t> seeds = cfg.seeds;
    if (!kind_info(cfg.kind).needs_graph && cfg.kind != "instability") seeds.resize(1);
    if (cfg.kind == "instability") seeds.resize(1);
    std::vector<RunRecord> out(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < seeds.size();) {
            try {
                out[i] = run_one(cfg, seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    int workers = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::filesystem::path emit(const RunRecord& rec, const std::filesystem::path& dir, Format fmt) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    auto path = dir / (rec.kind + "_" + rec.run_id + (fmt == Format::csv ? ".csv" : ".jsonl"));
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (fmt == Format::csv) {
        os << rec.csv;
    } else {
        json head = {{"run_id", rec.run_id}, {"kind", rec.kind}, {"seed", rec.seed}, {"version", rec.version},
                     {"config", rec.config}};
        os << head.dump() << "\n";
        for (const auto& line : rec.lines) {
            json j = line;
            j["run_id"] = rec.run_id;
            os << j.dump() << "\n";
        }
    }
    if (!os.flush()) throw std::runtime_error("write failed for " + path.string());
    return path;
}

std::filesystem::path emit_meta(const RunRecord& rec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto path = dir / (rec.kind + "_" + rec.run_id + ".meta.json");
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << json{{"run_id", rec.run_id}, {"wall_seconds", rec.wall_seconds}, {"version", rec.version}}.dump() << "\n";
    return path;
}

}  // namespace erspec::harness
