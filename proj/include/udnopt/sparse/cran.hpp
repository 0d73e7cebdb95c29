#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace udnopt::sparse {

/// An L-RRH, K-user downlink cloud RAN.
struct CranInstance {
    int num_rrh = 0;
    int num_users = 0;
    std::vector<int> antennas;            ///< N_l
    std::vector<double> power_budget;     ///< P_l [W]
    std::vector<double> efficiency;       ///< amplifier drain efficiency eta_l in (0, 1]
    std::vector<double> fronthaul_power;  ///< static RRH + fronthaul power P^c_l [W]
    std::vector<double> sinr_target;      ///< gamma_k, linear; 0 means "no QoS constraint"
    std::vector<double> noise_power;      ///< sigma_k^2 [W]
    /// channels[l][k] is h_lk, length N_l.
    std::vector<std::vector<Eigen::VectorXcd>> channels;

    /// Throws std::invalid_argument when dimensions or signs are inconsistent.
    void validate() const;

    /// Stacked channel of user k restricted to the given RRHs (in the given order).
    Eigen::VectorXcd stacked_channel(int user, const std::vector<int>& rrhs) const;
};

/// Knobs for synthetic instances. Defaults are the harness power model.
struct CranGeneratorOptions {
    int antennas_per_rrh = 2;
    double power_budget = 1.0;
    double efficiency = 0.25;
    double fronthaul_power = 5.0;
    double sinr_target = 1.0;
    double noise_power = 1.0;
    /// Large-scale gains beta_lk ~ U[min_gain, 1]; small-scale CN(0, I).
    double min_gain = 0.1;
};

CranInstance random_cran_instance(int num_rrh, int num_users, std::uint64_t seed,
                                  const CranGeneratorOptions& opts = {});

/// Structured text: counts, then N_l, P_l, eta_l, P^c_l, gamma_k, sigma_k^2, then every
/// h_lk (l-major, k-minor) as interleaved real/imag pairs. '#' starts a comment.
void write_cran_instance(std::ostream& out, const CranInstance& inst);
CranInstance read_cran_instance(std::istream& in);

}  // namespace udnopt::sparse
