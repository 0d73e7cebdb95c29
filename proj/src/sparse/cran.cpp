#include "udnopt/sparse/cran.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace udnopt::sparse {

void CranInstance::validate() const {
    if (num_rrh < 0 || num_users < 0) throw std::invalid_argument("cran instance: negative counts");
    const auto L = static_cast<std::size_t>(num_rrh);
    const auto K = static_cast<std::size_t>(num_users);
    if (antennas.size() != L || power_budget.size() != L || efficiency.size() != L ||
        fronthaul_power.size() != L || sinr_target.size() != K || noise_power.size() != K ||
        channels.size() != L) {
        throw std::invalid_argument("cran instance: array lengths do not match L and K");
    }
    for (std::size_t l = 0; l < L; ++l) {
        if (antennas[l] < 1) throw std::invalid_argument("cran instance: each RRH needs >= 1 antenna");
        if (!(power_budget[l] > 0)) throw std::invalid_argument("cran instance: power budgets must be positive");
        if (!(efficiency[l] > 0 && efficiency[l] <= 1))
            throw std::invalid_argument("cran instance: efficiency must lie in (0, 1]");
        if (!(fronthaul_power[l] >= 0)) throw std::invalid_argument("cran instance: negative fronthaul power");
        if (channels[l].size() != K) throw std::invalid_argument("cran instance: channel table has wrong user count");
        for (const auto& h : channels[l]) {
            if (h.size() != antennas[l]) throw std::invalid_argument("cran instance: channel length != N_l");
            if (!h.allFinite()) throw std::invalid_argument("cran instance: non-finite channel");
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        if (!(sinr_target[k] >= 0) || !std::isfinite(sinr_target[k]))
            throw std::invalid_argument("cran instance: SINR targets must be finite and >= 0");
        if (!(noise_power[k] > 0)) throw std::invalid_argument("cran instance: noise powers must be positive");
    }
}

Eigen::VectorXcd CranInstance::stacked_channel(int user, const std::vector<int>& rrhs) const {
    Eigen::Index total = 0;
    for (int l : rrhs) total += antennas[l];
    Eigen::VectorXcd h(total);
    Eigen::Index off = 0;
    for (int l : rrhs) {
        h.segment(off, antennas[l]) = channels[l][user];
        off += antennas[l];
    }
    return h;
}

CranInstance random_cran_instance(int num_rrh, int num_users, std::uint64_t seed, const CranGeneratorOptions& opts) {
    if (num_rrh < 1 || num_users < 0) throw std::invalid_argument("random_cran_instance: need L >= 1, K >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> gain(opts.min_gain, 1.0);
    CranInstance inst;
    inst.num_rrh = num_rrh;
    inst.num_users = num_users;
    inst.antennas.assign(num_rrh, opts.antennas_per_rrh);
    inst.power_budget.assign(num_rrh, opts.power_budget);
    inst.efficiency.assign(num_rrh, opts.efficiency);
    inst.fronthaul_power.assign(num_rrh, opts.fronthaul_power);
    inst.sinr_target.assign(num_users, opts.sinr_target);
    inst.noise_power.assign(num_users, opts.noise_power);
    inst.channels.resize(num_rrh);
    for (int l = 0; l < num_rrh; ++l) {
        for (int k = 0; k < num_users; ++k) {
            const double beta = std::sqrt(gain(rng));
            Eigen::VectorXcd h(opts.antennas_per_rrh);
            for (Eigen::Index n = 0; n < h.size(); ++n) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                h[n] = beta * std::complex<double>(re, im);
            }
            inst.channels[l].push_back(h);
        }
    }
    inst.validate();
    return inst;
}

void write_cran_instance(std::ostream& out, const CranInstance& inst) {
    inst.validate();
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    auto line = [&out](const auto& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << values[i];
        out << '\n';
    };
    out << "# L K\n" << inst.num_rrh << ' ' << inst.num_users << '\n';
    out << "# antennas\n";
    line(inst.antennas);
    out << "# power budgets\n";
    line(inst.power_budget);
    out << "# efficiencies\n";
    line(inst.efficiency);
    out << "# fronthaul powers\n";
    line(inst.fronthaul_power);
    out << "# sinr targets\n";
    line(inst.sinr_target);
    out << "# noise powers\n";
    line(inst.noise_power);
    out << "# channels h_lk as re im pairs, l-major\n";
    for (int l = 0; l < inst.num_rrh; ++l) {
        for (int k = 0; k < inst.num_users; ++k) {
            const auto& h = inst.channels[l][k];
            for (Eigen::Index n = 0; n < h.size(); ++n)
                out << (n ? " " : "") << h[n].real() << ' ' << h[n].imag();
            out << '\n';
        }
    }
    out.flags(flags);
    out.precision(prec);
}

CranInstance read_cran_instance(std::istream& in) {
    std::ostringstream clean;
    for (std::string line; std::getline(in, line);) {
        const auto hash = line.find('#');
        clean << line.substr(0, hash) << '\n';
    }
    std::istringstream ss(clean.str());
    auto next = [&ss]() {
        std::string tok;
        if (!(ss >> tok)) throw std::invalid_argument("cran instance file: unexpected end of input");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cran instance file: bad number '" + tok + "'");
        }
        if (used != tok.size()) throw std::invalid_argument("cran instance file: bad number '" + tok + "'");
        return v;
    };
    auto next_count = [&]() {
        const double v = next();
        if (v < 0 || v != std::floor(v) || v > 1e6) throw std::invalid_argument("cran instance file: bad count");
        return static_cast<int>(v);
    };
    CranInstance inst;
    inst.num_rrh = next_count();
    inst.num_users = next_count();
    for (int l = 0; l < inst.num_rrh; ++l) inst.antennas.push_back(next_count());
    for (int l = 0; l < inst.num_rrh; ++l) inst.power_budget.push_back(next());
    for (int l = 0; l < inst.num_rrh; ++l) inst.efficiency.push_back(next());
    for (int l = 0; l < inst.num_rrh; ++l) inst.fronthaul_power.push_back(next());
    for (int k = 0; k < inst.num_users; ++k) inst.sinr_target.push_back(next());
    for (int k = 0; k < inst.num_users; ++k) inst.noise_power.push_back(next());
    inst.channels.resize(inst.num_rrh);
    for (int l = 0; l < inst.num_rrh; ++l) {
        for (int k = 0; k < inst.num_users; ++k) {
            Eigen::VectorXcd h(inst.antennas[l]);
            for (Eigen::Index n = 0; n < h.size(); ++n) {
                const double re = next();
                const double im = next();
                h[n] = {re, im};
            }
            inst.channels[l].push_back(h);
        }
    }
    if (std::string extra; ss >> extra) throw std::invalid_argument("cran instance file: trailing content");
    inst.validate();
    return inst;
}

}  // namespace udnopt::sparse
