#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coverlab/geometry.hpp"
#include "coverlab/harmonic_forms.hpp"

namespace coverlab {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StepRejection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Tracker { angle, stratonovich, both };

struct SimConfig {
    double dt = 1e-3;
    double T = 200.0;
    std::uint64_t base_seed = 20240601;
    int n_traj = 5000;
    std::optional<Point> start;   // nullopt: uniform in M
    Tracker tracker = Tracker::both;
    std::vector<double> checkpoints;  // empty: T/4, T/2, T
    double theta0 = 0.5;          // initial winding coordinate, every component
};

/// Throws SimulationError when dt or T violate the step-size rules.
void validate(const SimConfig& cfg, const PlanarDomain& domain);

struct WindingState {
    Eigen::VectorXd theta;
    Eigen::VectorXi rho;
    Eigen::VectorXd theta_strat;
};

Eigen::VectorXi winding_number(const Eigen::VectorXd& theta);

/// Euler step with radial mirror reflection.
Point step(const PlanarDomain& domain, Point pos, Point dW);

/// Adds the increments of both trackers for the segment prev -> next.
/// Throws StepRejection if the segment passes too close to a hole centre.
WindingState track_winding(Point prev, Point next, const FormBasis& basis, const WindingState& state);

struct Checkpoint {
    double t = 0.0;
    Eigen::MatrixXd theta;        // n_traj x k
    Eigen::MatrixXi rho;
    Eigen::MatrixXd theta_strat;
};

struct EnsembleResult {
    int k = 0;
    double T = 0.0;
    double dt = 0.0;
    std::uint64_t base_seed = 0;
    Eigen::MatrixXd theta;        // n_traj x k, terminal
    Eigen::MatrixXi rho;
    Eigen::MatrixXd theta_strat;
    Eigen::MatrixXd qv;           // n_traj x (k*k), row-major qv_ij
    std::vector<Checkpoint> checkpoints;
    std::vector<long long> rejected_steps;  // per trajectory
    long long total_steps = 0;
    double rejection_rate = 0.0;
    std::vector<std::string> warnings;

    int n_traj() const { return static_cast<int>(theta.rows()); }
};

/// Trajectories run in parallel; trajectory i draws from Philox stream i.
EnsembleResult simulate(const PlanarDomain& domain, const FormBasis& basis, const SimConfig& cfg);
/// One trajectory after another; bit-identical to simulate().
EnsembleResult simulate_serial(const PlanarDomain& domain, const FormBasis& basis, const SimConfig& cfg);

void write_ensemble_csv(std::ostream& os, const EnsembleResult& e);
void write_checkpoints_csv(std::ostream& os, const EnsembleResult& e);
/// Reads the terminal columns back (checkpoints are not part of this file).
EnsembleResult read_ensemble_csv(std::istream& is);

}  // namespace coverlab
