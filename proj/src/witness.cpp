#include "qimp/witness.hpp"

#include <random>

namespace qimp {

std::vector<Witness> random_witnesses(std::size_t count, std::size_t qubits, const WitnessOptions& opt) {
    if (opt.lo > opt.hi) throw std::invalid_argument("empty value range for random witnesses");
    if (opt.max_states < 1) throw std::invalid_argument("witnesses need at least one classical state");
    const std::size_t dim = dim_for_qubits(qubits);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<std::int64_t> value(opt.lo, opt.hi);
    std::uniform_int_distribution<int> states(1, opt.max_states);
    std::uniform_real_distribution<double> weight(0.05, 1.0);

    std::vector<Witness> out;
    out.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        const int k = states(rng);
        std::vector<double> ws(k);
        double total = 0;
        for (auto& x : ws) total += (x = weight(rng));
        POVD mu(dim);
        for (int s = 0; s < k; ++s) {
            ClassicalState sigma;
            for (const auto& v : opt.vars) sigma = sigma.updated(v, value(rng));
            std::vector<Complex> psi(dim);
            double norm = 0;
            for (auto& z : psi) {
                z = Complex(gauss(rng), gauss(rng));
                norm += std::norm(z);
            }
            CMatrix rho(dim, dim);
            const double scale = opt.mass * ws[s] / total / norm;
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) rho(i, j) = scale * psi[i] * std::conj(psi[j]);
            mu.accumulate(sigma, rho);
        }
        out.push_back({"random-" + std::to_string(w), std::move(mu)});
    }
    return out;
}

std::vector<Witness> basis_witnesses(std::size_t qubits, const std::vector<std::string>& vars, std::int64_t lo,
                                     std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("empty value range");
    const std::size_t dim = dim_for_qubits(qubits);
    std::vector<Witness> out;
    std::vector<std::int64_t> vals(vars.size(), lo);
    for (;;) {
        ClassicalState sigma;
        std::string id = "basis";
        for (std::size_t i = 0; i < vars.size(); ++i) {
            sigma = sigma.updated(vars[i], vals[i]);
            id += "-" + vars[i] + "=" + std::to_string(vals[i]);
        }
        out.push_back({id, POVD(sigma, CMatrix::basis_op(dim, 0, 0))});
        std::size_t i = 0;
        while (i < vals.size() && vals[i] == hi) vals[i++] = lo;
        if (i == vals.size()) break;
        ++vals[i];
    }
    return out;
}

std::vector<std::string> triple_vars(const Triple& t) {
    auto vars = classical_vars(t.program);
    for (const auto& p : {t.pre, t.post})
        for (const auto& v : free_vars(*p)) vars.insert(v);
    std::vector<std::string> out;
    for (const auto& v : vars)
        if (!v.empty() && v.front() != '$') out.push_back(v);
    return out;
}

}  // namespace qimp
