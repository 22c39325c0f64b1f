#include "coverlab/rbm.hpp"

#include <cmath>
#include <algorithm>
#include <exception>
#include <istream>
#include <ostream>

#include "coverlab/csv.hpp"
#include "coverlab/rng.hpp"

namespace coverlab {

Eigen::VectorXi winding_number(const Eigen::VectorXd& theta) {
    Eigen::VectorXi r(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) r[i] = static_cast<int>(std::floor(theta[i]));
    return r;
}

Point step(const PlanarDomain& domain, Point pos, Point dW) {
    Point cand = pos + dW;
    if (domain.contains(cand)) return cand;
    return boundary_projection(domain, cand).point;
}

namespace {

bool segment_near_pole(const PlanarDomain& dom, Point a, Point b) {
    for (const Circle& c : dom.holes()) {
        Point d = b - a;
        double len2 = dot(d, d);
        double s = len2 > 0.0 ? std::clamp(dot(c.center - a, d) / len2, 0.0, 1.0) : 0.0;
        Point q = a + s * d;
        if (norm(q - c.center) < 0.5 * c.radius) return true;
    }
    return false;
}

}  // namespace

WindingState track_winding(Point prev, Point next, const FormBasis& basis, const WindingState& state) {
    const PlanarDomain& dom = basis.grid->domain();
    if (segment_near_pole(dom, prev, next)) throw StepRejection("segment crosses a hole");
    WindingState out = state;
    const int k = basis.rank();
    if (out.theta_strat.size() != k) out.theta_strat = Eigen::VectorXd::Zero(k);
    Point mid = 0.5 * (prev + next);
    for (int i = 0; i < k; ++i) {
        out.theta[i] += basis.forms[i].increment(prev, next);
        out.theta_strat[i] += dot(basis.forms[i](mid), next - prev);
    }
    out.rho = winding_number(out.theta);
    return out;
}

void validate(const SimConfig& cfg, const PlanarDomain& domain) {
    if (!(cfg.dt > 0.0)) throw SimulationError("dt must be positive");
    if (!(cfg.T >= 0.0)) throw SimulationError("T must be non-negative");
    double rmin = domain.outer().radius;
    for (const Circle& c : domain.holes()) rmin = std::min(rmin, c.radius);
    if (cfg.dt > rmin * rmin / 100.0 * (1.0 + 1e-12))
        throw SimulationError("dt exceeds (min hole radius)^2/100");
    double steps = cfg.T / cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6) throw SimulationError("T/dt must be an integer");
    if (cfg.n_traj < 1) throw SimulationError("n_traj must be positive");
    for (double t : cfg.checkpoints) {
        if (t < 0.0 || t > cfg.T) throw SimulationError("checkpoint outside [0, T]");
        double s = t / cfg.dt;
        if (std::abs(s - std::round(s)) > 1e-6) throw SimulationError("checkpoint not on the time grid");
    }
    if (cfg.start && !domain.contains(*cfg.start)) throw SimulationError("start point is not inside the domain");
}

namespace {

// Bilinear tables of all k potentials, interleaved so one cell lookup serves every form.
struct FormTable {
    explicit FormTable(const FormBasis& b) : grid(*b.grid), k(b.rank()) {
        poles = b.forms[0].poles();
        W.resize(k * k);
        for (int i = 0; i < k; ++i) {
            if (b.forms[i].poles().size() != poles.size())
                throw std::invalid_argument("forms must share their pole list");
            for (int m = 0; m < k; ++m) W[i * k + m] = b.forms[i].weights()[m];
        }
        std::size_t nl = static_cast<std::size_t>(grid.nx()) * grid.ny();
        vals.assign(nl * k, 0.0);
        def.assign(nl, 1);
        for (int i = 0; i < k; ++i) {
            const GridPotential* p = b.forms[i].potential();
            if (!p) continue;
            for (std::size_t q = 0; q < nl; ++q) {
                vals[q * k + i] = p->lattice_values()[q];
                def[q] = def[q] && p->defined()[q];
            }
        }
    }

    const Grid& grid;
    int k;
    std::vector<Point> poles;
    std::vector<double> W;
    std::vector<double> vals;
    std::vector<std::uint8_t> def;
};

class FormSet {
public:
    explicit FormSet(const FormTable& t) : t_(t), k_(t.k), tau_(t.poles.size()), ang_(t.poles.size()) {}

    int k() const { return k_; }

    // phi_i(p) and omega_i(p) for all i
    void eval(Point p, double* phi, Point* omega) {
        const auto& poles = t_.poles;
        for (std::size_t m = 0; m < poles.size(); ++m) tau_[m] = tau_vector(poles[m], p);
        const Grid& g = t_.grid;
        const double h = g.h();
        double fx = (p.x - g.origin().x) / h, fy = (p.y - g.origin().y) / h;
        int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
        if (!g.in_lattice(i, j) || !g.in_lattice(i + 1, j + 1))
            throw SimulationError("trajectory point outside the lattice");
        double u = fx - i, v = fy - j;
        std::size_t q00 = g.lattice_id(i, j), q10 = q00 + 1, q01 = q00 + g.nx(), q11 = q01 + 1;
        const auto& def = t_.def;
        if (!(def[q00] && def[q10] && def[q01] && def[q11]))
            throw SimulationError("potential undefined at a trajectory point");
        const double* V = t_.vals.data();
        for (int f = 0; f < k_; ++f) {
            double f00 = V[q00 * k_ + f], f10 = V[q10 * k_ + f];
            double f01 = V[q01 * k_ + f], f11 = V[q11 * k_ + f];
            phi[f] = (1 - u) * (1 - v) * f00 + u * (1 - v) * f10 + (1 - u) * v * f01 + u * v * f11;
            Point w{((1 - v) * (f10 - f00) + v * (f11 - f01)) / h, ((1 - u) * (f01 - f00) + u * (f11 - f10)) / h};
            for (int m = 0; m < k_; ++m) w = w + t_.W[f * k_ + m] * tau_[m];
            omega[f] = w;
        }
    }

    // analytic part of the angle tracker, sum_m W(i,m) * turn about pole m
    void turns(Point a, Point b, double* out) {
        for (std::size_t m = 0; m < t_.poles.size(); ++m) ang_[m] = angle_increment(t_.poles[m], a, b);
        for (int f = 0; f < k_; ++f) {
            double s = 0.0;
            for (int m = 0; m < k_; ++m) s += t_.W[f * k_ + m] * ang_[m];
            out[f] = s;
        }
    }

private:
    const FormTable& t_;
    int k_;
    std::vector<Point> tau_;
    std::vector<double> ang_;
};

struct TrajectoryOutput {
    std::vector<double> theta, theta_strat, qv;
    std::vector<std::vector<double>> cp_theta, cp_strat;
    long long rejected = 0;
};

class Walker {
public:
    Walker(const PlanarDomain& dom, const FormTable& table, const SimConfig& cfg, std::uint64_t index)
        : dom_(dom), fs_(table), cfg_(cfg), rng_(cfg.base_seed, index), k_(fs_.k()) {
        phi_.resize(k_);
        om_.resize(k_);
        phi_n_.resize(k_);
        om_n_.resize(k_);
        om_m_.resize(k_);
        phi_m_.resize(k_);
        turn_.resize(k_);
        theta_.assign(k_, cfg.theta0);
        strat_.assign(k_, cfg.theta0);
        qv_.assign(k_ * k_, 0.0);
        angle_ = cfg.tracker != Tracker::stratonovich;
        strat_on_ = cfg.tracker != Tracker::angle;
    }

    TrajectoryOutput run(const std::vector<long long>& cp_steps) {
        pos_ = cfg_.start ? *cfg_.start : uniform_start();
        fs_.eval(pos_, phi_.data(), om_.data());
        TrajectoryOutput out;
        long long n_steps = std::llround(cfg_.T / cfg_.dt);
        std::size_t next_cp = 0;
        const double sdt = std::sqrt(cfg_.dt);
        for (long long s = 0; s <= n_steps; ++s) {
            while (next_cp < cp_steps.size() && cp_steps[next_cp] == s) {
                out.cp_theta.push_back(angle_ ? theta_ : strat_);
                out.cp_strat.push_back(strat_);
                ++next_cp;
            }
            if (s == n_steps) break;
            double z0, z1;
            rng_.normal_pair(z0, z1);
            rejected_now_ = false;
            advance({sdt * z0, sdt * z1}, cfg_.dt, 0);
            if (rejected_now_) ++out.rejected;
        }
        out.theta = angle_ ? theta_ : strat_;
        out.theta_strat = strat_;
        out.qv = qv_;
        return out;
    }

private:
    Point uniform_start() {
        const Circle& o = dom_.outer();
        for (int tries = 0; tries < 100000; ++tries) {
            Point p{o.center.x + o.radius * (2.0 * rng_.uniform() - 1.0),
                    o.center.y + o.radius * (2.0 * rng_.uniform() - 1.0)};
            if (dom_.contains(p)) return p;
        }
        throw SimulationError("could not sample a uniform start point");
    }

    void advance(Point dW, double h, int depth) {
        Point cand = pos_ + dW;
        if (!dom_.contains(cand)) {
            try {
                cand = boundary_projection(dom_, cand).point;
            } catch (const ReflectionError& e) {
                throw SimulationError(std::string("reflection failed: ") + e.what());
            }
        }
        if (segment_near_pole(dom_, pos_, cand)) {
            if (depth >= 12) throw SimulationError("step refinement did not resolve a hole crossing");
            rejected_now_ = true;
            // Brownian bridge midpoint of the free increment
            double z0, z1;
            rng_.normal_pair(z0, z1);
            double sd = std::sqrt(0.25 * h);
            Point start = pos_;
            Point mid{start.x + 0.5 * dW.x + sd * z0, start.y + 0.5 * dW.y + sd * z1};
            advance(mid - start, 0.5 * h, depth + 1);
            advance(start + dW - mid, 0.5 * h, depth + 1);
            return;
        }
        accept(cand, h);
    }

    void accept(Point next, double h) {
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j) qv_[i * k_ + j] += dot(om_[i], om_[j]) * h;
        fs_.eval(next, phi_n_.data(), om_n_.data());
        Point d = next - pos_;
        if (angle_) {
            fs_.turns(pos_, next, turn_.data());
            for (int i = 0; i < k_; ++i) theta_[i] += turn_[i] + (phi_n_[i] - phi_[i]);
        }
        if (strat_on_) {
            fs_.eval(0.5 * (pos_ + next), phi_m_.data(), om_m_.data());
            for (int i = 0; i < k_; ++i) strat_[i] += dot(om_m_[i], d);
        }
        pos_ = next;
        std::swap(phi_, phi_n_);
        std::swap(om_, om_n_);
    }

    const PlanarDomain& dom_;
    FormSet fs_;
    const SimConfig& cfg_;
    PhiloxStream rng_;
    int k_;
    bool angle_ = true, strat_on_ = true, rejected_now_ = false;
    Point pos_;
    std::vector<double> phi_, phi_n_, phi_m_, turn_, theta_, strat_, qv_;
    std::vector<Point> om_, om_n_, om_m_;
};

std::vector<double> checkpoint_times(const SimConfig& cfg) {
    if (!cfg.checkpoints.empty()) {
        std::vector<double> c = cfg.checkpoints;
        std::sort(c.begin(), c.end());
        return c;
    }
    return {0.25 * cfg.T, 0.5 * cfg.T, cfg.T};
}

EnsembleResult make_result(const FormBasis& basis, const SimConfig& cfg) {
    EnsembleResult r;
    r.k = basis.rank();
    r.T = cfg.T;
    r.dt = cfg.dt;
    r.base_seed = cfg.base_seed;
    int n = cfg.n_traj, k = r.k;
    r.theta.resize(n, k);
    r.rho.resize(n, k);
    r.theta_strat.resize(n, k);
    r.qv.resize(n, k * k);
    r.rejected_steps.assign(n, 0);
    for (double t : checkpoint_times(cfg)) {
        Checkpoint c;
        c.t = t;
        c.theta.resize(n, k);
        c.rho.resize(n, k);
        c.theta_strat.resize(n, k);
        r.checkpoints.push_back(std::move(c));
    }
    return r;
}

std::vector<long long> checkpoint_steps(const SimConfig& cfg) {
    std::vector<long long> s;
    for (double t : checkpoint_times(cfg)) s.push_back(std::llround(t / cfg.dt));
    return s;
}

void store(EnsembleResult& r, int i, const TrajectoryOutput& o) {
    for (int c = 0; c < r.k; ++c) {
        r.theta(i, c) = o.theta[c];
        r.rho(i, c) = static_cast<int>(std::floor(o.theta[c]));
        r.theta_strat(i, c) = o.theta_strat[c];
    }
    for (int c = 0; c < r.k * r.k; ++c) r.qv(i, c) = o.qv[c];
    for (std::size_t p = 0; p < r.checkpoints.size(); ++p)
        for (int c = 0; c < r.k; ++c) {
            r.checkpoints[p].theta(i, c) = o.cp_theta[p][c];
            r.checkpoints[p].rho(i, c) = static_cast<int>(std::floor(o.cp_theta[p][c]));
            r.checkpoints[p].theta_strat(i, c) = o.cp_strat[p][c];
        }
    r.rejected_steps[i] = o.rejected;
}

void finish(EnsembleResult& r, const SimConfig& cfg) {
    long long rej = 0;
    for (long long x : r.rejected_steps) rej += x;
    r.total_steps = std::llround(cfg.T / cfg.dt) * static_cast<long long>(cfg.n_traj);
    r.rejection_rate = r.total_steps > 0 ? static_cast<double>(rej) / r.total_steps : 0.0;
    if (r.rejection_rate > 0.01)
        throw SimulationError("step rejection rate " + std::to_string(r.rejection_rate) + " exceeds 1%");
    if (r.rejection_rate > 0.001)
        r.warnings.push_back("step rejection rate " + std::to_string(r.rejection_rate) + " exceeds 0.1%");
}

}  // namespace

EnsembleResult simulate(const PlanarDomain& domain, const FormBasis& basis, const SimConfig& cfg) {
    validate(cfg, domain);
    EnsembleResult r = make_result(basis, cfg);
    const std::vector<long long> cps = checkpoint_steps(cfg);
    const FormTable table(basis);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < cfg.n_traj; ++i) {
        try {
            Walker w(domain, table, cfg, static_cast<std::uint64_t>(i));
            store(r, i, w.run(cps));
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    finish(r, cfg);
    return r;
}

EnsembleResult simulate_serial(const PlanarDomain& domain, const FormBasis& basis, const SimConfig& cfg) {
    validate(cfg, domain);
    EnsembleResult r = make_result(basis, cfg);
    const std::vector<long long> cps = checkpoint_steps(cfg);
    const FormTable table(basis);
    for (int i = 0; i < cfg.n_traj; ++i) {
        Walker w(domain, table, cfg, static_cast<std::uint64_t>(i));
        store(r, i, w.run(cps));
    }
    finish(r, cfg);
    return r;
}

// ---------------------------------------------------------------- CSV

void write_ensemble_csv(std::ostream& os, const EnsembleResult& e) {
    CsvWriter w(os);
    std::vector<std::string> h{"traj_id", "T"};
    for (int i = 1; i <= e.k; ++i) h.push_back("theta_" + std::to_string(i));
    for (int i = 1; i <= e.k; ++i) h.push_back("rho_" + std::to_string(i));
    for (int i = 1; i <= e.k; ++i)
        for (int j = 1; j <= e.k; ++j) h.push_back("qv_" + std::to_string(i) + std::to_string(j));
    w.header(h);
    for (int t = 0; t < e.n_traj(); ++t) {
        w.cell(t).cell(e.T);
        for (int i = 0; i < e.k; ++i) w.cell(e.theta(t, i));
        for (int i = 0; i < e.k; ++i) w.cell(e.rho(t, i));
        for (int i = 0; i < e.k * e.k; ++i) w.cell(e.qv(t, i));
        w.end_row();
    }
}

void write_checkpoints_csv(std::ostream& os, const EnsembleResult& e) {
    CsvWriter w(os);
    std::vector<std::string> h{"traj_id", "t"};
    for (int i = 1; i <= e.k; ++i) h.push_back("theta_" + std::to_string(i));
    for (int i = 1; i <= e.k; ++i) h.push_back("rho_" + std::to_string(i));
    for (int i = 1; i <= e.k; ++i) h.push_back("theta_strat_" + std::to_string(i));
    w.header(h);
    for (const Checkpoint& c : e.checkpoints)
        for (int t = 0; t < e.n_traj(); ++t) {
            w.cell(t).cell(c.t);
            for (int i = 0; i < e.k; ++i) w.cell(c.theta(t, i));
            for (int i = 0; i < e.k; ++i) w.cell(c.rho(t, i));
            for (int i = 0; i < e.k; ++i) w.cell(c.theta_strat(t, i));
            w.end_row();
        }
}

EnsembleResult read_ensemble_csv(std::istream& is) {
    CsvTable t = read_csv(is);
    EnsembleResult e;
    int k = 0;
    while (t.column("theta_" + std::to_string(k + 1)) >= 0) ++k;
    if (k == 0 || t.column("traj_id") < 0 || t.column("T") < 0)
        throw std::runtime_error("ensemble CSV lacks traj_id/T/theta columns");
    e.k = k;
    const int n = static_cast<int>(t.rows.size());
    e.theta.resize(n, k);
    e.rho.resize(n, k);
    e.qv.resize(n, k * k);
    e.theta_strat.resize(0, k);
    int cT = t.column("T");
    for (int r = 0; r < n; ++r) {
        e.T = parse_double(t.rows[r][cT]);
        for (int i = 0; i < k; ++i) {
            e.theta(r, i) = parse_double(t.rows[r][t.column("theta_" + std::to_string(i + 1))]);
            e.rho(r, i) = static_cast<int>(parse_double(t.rows[r][t.column("rho_" + std::to_string(i + 1))]));
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                int c = t.column("qv_" + std::to_string(i + 1) + std::to_string(j + 1));
                e.qv(r, i * k + j) = c >= 0 ? parse_double(t.rows[r][c]) : std::nan("");
            }
    }
    return e;
}

}  // namespace coverlab
