#include "coverlab/pipelines.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "coverlab/csv.hpp"
#include "coverlab/heat_kernel.hpp"
#include "coverlab/twisted_spectra.hpp"
#include "coverlab/winding_stats.hpp"

namespace coverlab {

bool RunReport::pass() const {
    for (const Check& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<std::string> RunReport::failing() const {
    std::vector<std::string> f;
    for (const Check& c : checks)
        if (!c.pass) f.push_back(c.name);
    return f;
}

Session::Session(RunConfig cfg, std::filesystem::path out_dir)
    : cfg_(std::move(cfg)), domain_(build_domain(cfg_.domain)), out_(std::move(out_dir)) {
    std::filesystem::create_directories(out_);
}

std::shared_ptr<const Grid> Session::grid() {
    if (!grid_) grid_ = std::make_shared<const Grid>(domain_, cfg_.h);
    return grid_;
}

const FormBasis& Session::basis() {
    if (!basis_) basis_ = dual_basis(domain_, grid());
    return *basis_;
}

std::filesystem::path Session::file(const std::string& name, RunReport& r) const {
    r.files.push_back(name);
    return out_ / name;
}

std::optional<std::pair<double, double>> Session::neumann_annulus() const {
    const auto& o = domain_.outer();
    if (domain_.rank() != 1 || !domain_.all_neumann()) return std::nullopt;
    const auto& hole = domain_.holes()[0];
    if (norm(hole.center - o.center) > 1e-12) return std::nullopt;
    return std::make_pair(hole.radius, o.radius);
}

void Session::forms(RunReport& r) {
    const FormBasis& b = basis();
    const int k = b.rank();
    std::ofstream os(file("periods.csv", r));
    CsvWriter w(os);
    w.header({"loop", "form", "period", "raw_period"});
    double dev = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            w.cell(i + 1).cell(j + 1).cell(b.periods(i, j)).cell(b.raw_periods(i, j));
            w.end_row();
            dev = std::max(dev, std::abs(b.periods(i, j) - (i == j ? 1.0 : 0.0)));
        }
    r.checks.push_back({"period_matrix_identity", dev, 0.0, 1e-3, dev < 1e-3, "identity"});

    std::ofstream ts(file("tangential_defect.csv", r));
    CsvWriter tw(ts);
    tw.header({"form", "max_normal_component"});
    for (int j = 0; j < k; ++j) {
        tw.cell(j + 1).cell(tangential_defect(b.forms[j], domain_));
        tw.end_row();
    }
}

void Session::sigma(RunReport& r) {
    const FormBasis& b = basis();
    const int k = b.rank();
    Eigen::MatrixXd S = covariance_matrix(b);
    std::ofstream os(file("sigma.csv", r));
    CsvWriter w(os);
    w.header({"i", "j", "sigma", "gram_A"});
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            w.cell(i + 1).cell(j + 1).cell(S(i, j)).cell(b.gram_A(i, j));
            w.end_row();
        }
    double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
    double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (S + S.transpose())).eigenvalues().minCoeff();
    r.checks.push_back({"sigma_symmetric", asym, 0.0, 1e-12, asym <= 1e-12, "identity"});
    r.checks.push_back({"sigma_min_eigenvalue", lmin, 0.0, 0.0, lmin > 0.0, "computed"});
    if (auto ann = neumann_annulus()) {
        double target = annulus_sigma(ann->first, ann->second);
        double rel = std::abs(S(0, 0) - target) / target;
        r.checks.push_back({"sigma_annulus", S(0, 0), target, 0.02, rel < 0.02, "closed form"});
    }
    r.notes.push_back("sigma quadrature error estimate " + fmt17(b.quadrature_error));
}

void Session::simulate(RunReport& r) {
    ensemble_ = coverlab::simulate(domain_, basis(), cfg_.sim);
    {
        std::ofstream os(file("ensemble.csv", r));
        write_ensemble_csv(os, *ensemble_);
    }
    {
        std::ofstream os(file("checkpoints.csv", r));
        write_checkpoints_csv(os, *ensemble_);
    }
    for (const auto& wmsg : ensemble_->warnings) r.warnings.push_back(wmsg);
    r.notes.push_back("step rejection rate " + fmt17(ensemble_->rejection_rate));
}

void Session::verify(RunReport& r, const std::optional<std::filesystem::path>& ensemble_csv) {
    EnsembleResult e;
    if (ensemble_) {
        e = *ensemble_;
    } else {
        std::filesystem::path p = ensemble_csv ? *ensemble_csv : out_ / "ensemble.csv";
        std::ifstream in(p);
        if (!in) throw ConfigError("no ensemble at '" + p.string() + "'; run simulate first or pass --ensemble");
        e = read_ensemble_csv(in);
    }
    const FormBasis& b = basis();
    if (e.k != b.rank()) throw ConfigError("ensemble rank does not match the domain");
    Eigen::MatrixXd S = covariance_matrix(b);
    CltReport clt = clt_covariance(e, S, cfg_.clt);
    std::vector<ReportRow> rows = report_rows(clt);

    bool qv_ok = e.qv.allFinite();
    std::optional<QvCheck> qv;
    if (qv_ok && e.T > 0.0) {
        qv = ergodic_qv_check(e, S, cfg_.qv_tol);
        for (int i = 0; i < e.k; ++i) {
            std::string s = std::to_string(i + 1);
            rows.push_back({"qv_rate_" + s + s, qv->mean(i, i), S(i, i), cfg_.qv_tol, qv->diag_rel_error[i] < cfg_.qv_tol});
        }
    }
    if (auto ann = neumann_annulus(); ann && ensemble_ && ensemble_->checkpoints.size() >= 2) {
        SlopeFit f = variance_slope(*ensemble_, 0);
        double target = annulus_sigma(ann->first, ann->second);
        rows.push_back({"variance_slope", f.slope, target, 0.15, std::abs(f.slope - target) / target < 0.15});
    }

    std::ofstream os(file("clt_report.csv", r));
    CsvWriter w(os);
    w.header({"statistic", "value", "target", "tolerance", "pass"});
    for (const ReportRow& row : rows) {
        w.cell(row.statistic).cell(row.value).cell(row.target).cell(row.tolerance).cell(row.pass ? 1 : 0);
        w.end_row();
        r.checks.push_back({row.statistic, row.value, row.target, row.tolerance, row.pass,
                            row.statistic.rfind("variance_slope", 0) == 0 ? "closed form" : "computed"});
    }
    std::ofstream txt(file("clt_report.txt", r));
    txt << "T " << fmt17(clt.T) << "\nn " << clt.n << "\n";
    for (int i = 0; i < e.k; ++i)
        txt << "mean rho_" << i + 1 << "/T " << fmt17(clt.mean[i]) << " se " << fmt17(clt.mean_se[i]) << " z "
            << fmt17(clt.z[i]) << "\n";
    for (int i = 0; i < e.k; ++i)
        for (int j = 0; j < e.k; ++j)
            txt << "cov " << i + 1 << j + 1 << " " << fmt17(clt.cov(i, j)) << " target " << fmt17(clt.target(i, j))
                << "\n";
    txt << "chi2 " << fmt17(clt.chi2) << " df " << clt.chi2_df << " p " << fmt17(clt.p_value) << "\n";
    txt << "underflow " << (clt.underflow ? "yes" : "no") << "\n";
    txt << "pass " << (clt.pass() ? "yes" : "no") << "\n";
    if (!clt.se_reliable) r.warnings.push_back("fewer than 100 trajectories: drift standard error is unreliable");
    if (clt.underflow) r.warnings.push_back("covariance test underflow: horizon too short or ensemble too small");
}

void Session::spectrum(RunReport& r) {
    const FormBasis& b = basis();
    int fi = cfg_.spectrum.form;
    if (fi < 0 || fi >= b.rank()) throw ConfigError("spectrum.form out of range");
    auto form = std::make_shared<const EdgeForm>(lattice_form(grid(), b.forms[fi]));
    double lambda0 = principal_eigenpair(assemble_untwisted(grid())).mu;
    std::vector<CurvePoint> curve = eigenvalue_curve(grid(), form, cfg_.spectrum.ts);
    std::ofstream os(file("spectrum.csv", r));
    CsvWriter w(os);
    w.header({"t", "mu", "residual"});
    for (const auto& c : curve) {
        w.cell(c.t).cell(c.mu).cell(c.residual);
        w.end_row();
    }
    auto rel = [](double a, double c) { return std::abs(a - c) / std::max({std::abs(a), std::abs(c), 1e-300}); };
    const double tol = 1e-6;
    double sym = 0.0, per = 0.0, at_int = 0.0, gap = INFINITY, above = INFINITY;
    bool have_sym = false, have_per = false, have_int = false, have_gap = false;
    for (const auto& a : curve) {
        double frac = std::abs(a.t - std::round(a.t));
        if (frac < 1e-12) {
            have_int = true;
            at_int = std::max(at_int, std::abs(a.mu - lambda0) / std::max(1.0, std::abs(lambda0)));
        } else if (frac >= 0.05) {
            have_gap = true;
            gap = std::min(gap, a.mu - lambda0);
        }
        above = std::min(above, a.mu - lambda0);
        for (const auto& c : curve) {
            if (std::abs(a.t + c.t) < 1e-12 && a.t > 0.0) {
                have_sym = true;
                sym = std::max(sym, rel(a.mu, c.mu));
            }
            double d = c.t - a.t;
            if (d > 0.0 && std::abs(d - std::round(d)) < 1e-12 && std::round(d) >= 1.0) {
                have_per = true;
                per = std::max(per, rel(a.mu, c.mu));
            }
            // t and 1 - t: evenness combined with the period
            double s = a.t + c.t;
            if (a.t < c.t && std::abs(s - std::round(s)) < 1e-12 && std::round(s) != 0.0 && frac >= 1e-12) {
                have_per = true;
                per = std::max(per, rel(a.mu, c.mu));
            }
        }
    }
    if (have_sym) r.checks.push_back({"mu_symmetry", sym, 0.0, tol, sym < tol, "identity"});
    if (have_per) r.checks.push_back({"mu_period", per, 0.0, tol, per < tol, "identity"});
    if (have_int) r.checks.push_back({"mu_at_integers_equals_lambda0", at_int, 0.0, tol, at_int < tol, "computed"});
    if (have_gap) r.checks.push_back({"mu_gap_off_integers", gap, 0.0, 0.0, gap > 1e-8, "computed"});
    r.checks.push_back({"mu_at_least_lambda0", above, 0.0, 1e-8, above > -1e-8 * std::max(1.0, lambda0), "computed"});
}

void Session::hessian(RunReport& r) {
    const FormBasis& b = basis();
    int fi = cfg_.hessian.form;
    if (fi < 0 || fi >= b.rank()) throw ConfigError("hessian.form out of range");
    auto form = std::make_shared<const EdgeForm>(lattice_form(grid(), b.forms[fi]));
    HessianCheck h = hessian_check(grid(), form, cfg_.hessian.t);
    std::ofstream os(file("hessian.csv", r));
    CsvWriter w(os);
    w.header({"t", "lambda0", "mu_t", "mu_t_half", "I_quadform", "I_from_mu", "rel_error"});
    w.cell(cfg_.hessian.t).cell(h.lambda0).cell(h.mu_t).cell(h.mu_half).cell(h.I).cell(h.richardson).cell(h.rel_error);
    w.end_row();
    r.checks.push_back({"hessian_identity", h.richardson, h.I, 0.02, h.rel_error < 0.02, "computed"});
    if (domain_.all_neumann()) {
        double gram = gram_I_neumann(b)(fi, fi);
        double rel = std::abs(h.I - gram) / gram;
        r.checks.push_back({"I_matches_neumann_gram", h.I, gram, 0.02, rel < 0.02, "computed"});
    }
}

void Session::heatkernel(RunReport& r) {
    const FormBasis& b = basis();
    if (b.rank() != 1) {
        r.notes.push_back("heatkernel skipped: the cover kernel is reconstructed for one-hole domains only");
        return;
    }
    const auto& hk = cfg_.heatkernel;
    auto g = grid();
    auto form = std::make_shared<const EdgeForm>(lattice_form(g, b.forms[0]));
    int x = g->nearest_active(hk.x), y = g->nearest_active(hk.y);
    double t_min = std::min(hk.consistency_t, hk.profile_t);
    for (double t : hk.ts) t_min = std::min(t_min, t);
    CoverKernel K(g, form, {x, y}, t_min, hk.n_quad);

    TwistedOperator op0 = assemble(g, form, 0.0);
    EigenResult e0 = principal_eigenpair(op0);
    double I = quadratic_form_I(e0, *form, solve_g_omega(op0, e0, *form).g);
    Eigen::MatrixXd A(1, 1);
    A(0, 0) = I;
    AsymptoticProfile P = asymptotic_profile(A, e0.mu, e0.phi[x].real(), e0.phi[y].real(),
                                             Eigen::VectorXd::Constant(1, K.xi(x, y)));

    std::vector<AsymptoticRow> rows = asymptotic_check(K, P, hk.ts, x, y, hk.sheets);
    {
        std::ofstream os(file("heatkernel.csv", r));
        CsvWriter w(os);
        w.header({"t", "n", "hhat", "scaled", "predicted", "diff"});
        for (const auto& row : rows) {
            double hhat = row.scaled / (std::sqrt(row.t) * std::exp(P.lambda0 * row.t));
            w.cell(row.t).cell(row.n).cell(hhat).cell(row.scaled).cell(row.predicted).cell(row.diff);
            w.end_row();
        }
    }
    if (hk.ts.size() >= 2) {
        double t_lo = *std::min_element(hk.ts.begin(), hk.ts.end());
        double t_hi = *std::max_element(hk.ts.begin(), hk.ts.end());
        for (int n : hk.sheets) {
            double lo = 0.0, hi = 0.0;
            for (const auto& row : rows) {
                if (row.n != n) continue;
                if (row.t == t_lo) lo = row.diff;
                if (row.t == t_hi) hi = row.diff;
            }
            std::string s = std::to_string(n);
            r.checks.push_back({"residual_decreases_n" + s, hi, lo, 0.0, hi < lo, "computed"});
            r.checks.push_back({"residual_small_n" + s, hi, 0.0, 0.05 * P.C_I, hi < 0.05 * P.C_I, "computed"});
        }
    }

    double tc = hk.consistency_t;
    double err = base_consistency(K, tc, x, y, sheets_needed(I, tc));
    r.checks.push_back({"base_consistency", err, 0.0, 1e-7, err < 1e-7, "identity"});
    double imag = 0.0;
    for (int n : hk.sheets) {
        KernelEstimate k = K.value(tc, x, y, n);
        imag = std::max(imag, std::abs(k.imag) / std::max(std::abs(k.value), 1e-300));
    }
    r.checks.push_back({"imaginary_residue", imag, 0.0, 1e-8, imag < 1e-8, "identity"});

    int N = sheets_needed(I, hk.profile_t);
    SheetProfile prof = sheet_profile(K, hk.profile_t, x, x, N);
    {
        std::ofstream os(file("profile.csv", r));
        CsvWriter w(os);
        w.header({"n", "hhat"});
        for (int n = -N; n <= N; ++n) {
            w.cell(n).cell(prof.values[n + N]);
            w.end_row();
        }
    }
    double target = I * hk.profile_t / (4.0 * M_PI * M_PI);
    r.checks.push_back({"profile_variance", prof.variance, target, 0.05,
                        std::abs(prof.variance - target) / target < 0.05, "computed"});
    double S = covariance_matrix(b)(0, 0);
    double rate = prof.variance / (2.0 * hk.profile_t);
    r.checks.push_back({"profile_variance_vs_sigma", rate, S, 0.05, std::abs(rate - S) / S < 0.05, "computed"});
}

void Session::all(RunReport& r) {
    forms(r);
    sigma(r);
    simulate(r);
    verify(r);
    spectrum(r);
    hessian(r);
    heatkernel(r);
}

std::string manifest_json(const RunConfig& cfg, const std::string& command, const RunReport& r, double wall) {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["config"] = nlohmann::json::parse(canonical_json(cfg));
    j["version"] = "0.3.0";
    j["seed"] = cfg.sim.base_seed;
    j["wall_clock_seconds"] = wall;
    j["files"] = r.files;
    j["warnings"] = r.warnings;
    j["notes"] = r.notes;
    nlohmann::json checks = nlohmann::json::array();
    for (const Check& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"value", c.value},
                          {"target", c.target},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"provenance", c.provenance}});
    j["checks"] = checks;
    j["pass"] = r.pass();
    return j.dump(2);
}

}  // namespace coverlab
