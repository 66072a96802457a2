#include "qimp/state.hpp"

#include <json.hpp>
#include <sstream>

#include "qimp/opsem.hpp"

namespace qimp {

ClassicalState::ClassicalState(std::initializer_list<std::pair<const std::string, std::int64_t>> init) {
    for (const auto& [k, v] : init)
        if (v != 0) vals_[k] = v;
}

std::int64_t ClassicalState::operator[](std::string_view name) const {
    auto it = vals_.find(name);
    return it == vals_.end() ? 0 : it->second;
}

ClassicalState ClassicalState::updated(std::string_view x, std::int64_t n) const {
    ClassicalState out = *this;
    if (n == 0) {
        if (auto it = out.vals_.find(x); it != out.vals_.end()) out.vals_.erase(it);
    } else {
        out.vals_.insert_or_assign(std::string(x), n);
    }
    return out;
}

ClassicalState ClassicalState::updated(const std::vector<std::string>& xs, const Label& ns) const {
    if (xs.size() != ns.size()) throw std::invalid_argument("label width does not match variable count");
    ClassicalState out = *this;
    for (std::size_t i = 0; i < xs.size(); ++i) out = out.updated(xs[i], ns[i]);
    return out;
}

std::string ClassicalState::fingerprint() const {
    std::string s;
    for (const auto& [k, v] : vals_) {
        if (!s.empty()) s += ',';
        s += k + "=" + std::to_string(v);
    }
    return "{" + s + "}";
}

POVD::POVD(ClassicalState sigma, CMatrix rho) : dim_(rho.rows()) { accumulate(sigma, rho); }

CMatrix POVD::at(const ClassicalState& sigma) const {
    auto it = entries_.find(sigma);
    return it == entries_.end() ? CMatrix::zero(dim_) : it->second;
}

void POVD::accumulate(const ClassicalState& sigma, const CMatrix& rho) {
    if (rho.rows() != dim_ || rho.cols() != dim_) {
        throw DimensionError("POVD of dimension " + std::to_string(dim_) + " given a " + std::to_string(rho.rows()) +
                             "x" + std::to_string(rho.cols()) + " operator");
    }
    auto it = entries_.find(sigma);
    if (it == entries_.end()) {
        if (rho.trace().real() >= kEpsPrune) entries_.emplace(sigma, rho);
        return;
    }
    it->second += rho;
    if (it->second.trace().real() < kEpsPrune) entries_.erase(it);
}

POVD& POVD::operator+=(const POVD& o) {
    if (o.dim_ != dim_) throw DimensionError("POVD dimension mismatch");
    for (const auto& [sigma, rho] : o.entries_) accumulate(sigma, rho);
    return *this;
}

POVD povd_add(const POVD& a, const POVD& b) {
    POVD out = a;
    out += b;
    if (total_mass(out) > 1.0 + kEpsNum) throw MassError("POVD sum exceeds total mass 1");
    return out;
}

POVD restrict(const POVD& mu, const BExp& b) {
    POVD out(mu.dim());
    for (const auto& [sigma, rho] : mu.entries())
        if (eval_bexp(b, sigma)) out.accumulate(sigma, rho);
    return out;
}

double total_mass(const POVD& mu) {
    double m = 0.0;
    for (const auto& [sigma, rho] : mu.entries()) m += rho.trace().real();
    return m;
}

bool povd_eq(const POVD& a, const POVD& b, double tol) {
    if (a.dim() != b.dim()) return false;
    for (const auto& [sigma, rho] : a.entries())
        if (!approx_equal(rho, b.at(sigma), tol)) return false;
    for (const auto& [sigma, rho] : b.entries())
        if (!a.contains(sigma) && !approx_equal(rho, CMatrix::zero(a.dim()), tol)) return false;
    return true;
}

double povd_distance(const POVD& a, const POVD& b) {
    if (a.dim() != b.dim()) throw DimensionError("POVD dimension mismatch");
    double d = 0.0;
    for (const auto& [sigma, rho] : a.entries()) d += max_norm_distance(rho, b.at(sigma));
    for (const auto& [sigma, rho] : b.entries())
        if (!a.contains(sigma)) d += rho.max_abs();
    return d;
}

std::string povd_violation(const POVD& mu, double tol) {
    for (const auto& [sigma, rho] : mu.entries()) {
        if (rho.rows() != mu.dim()) return "entry " + sigma.fingerprint() + " has the wrong dimension";
        if (auto why = density_violation(rho, tol); !why.empty()) return "entry " + sigma.fingerprint() + ": " + why;
        if (rho.trace().real() < kEpsPrune) return "entry " + sigma.fingerprint() + " is below the prune threshold";
    }
    if (total_mass(mu) > 1.0 + tol) return "total mass exceeds 1";
    return {};
}

bool povd_leq(const POVD& a, const POVD& b, double tol) {
    if (a.dim() != b.dim()) throw DimensionError("POVD dimension mismatch");
    for (const auto& [sigma, rho] : a.entries())
        if (!loewner_leq(rho, b.at(sigma), tol)) return false;
    for (const auto& [sigma, rho] : b.entries())
        if (!a.contains(sigma) && !is_psd(rho, tol)) return false;
    return true;
}

// --- JSON ---

using nlohmann::json;

LoadedPOVD povd_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("POVD JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("qubits") || !doc.contains("entries")) {
        throw FormatError("POVD JSON needs 'qubits' and 'entries'");
    }
    LoadedPOVD out;
    for (const auto& q : doc.at("qubits")) {
        if (!q.is_string()) throw FormatError("qubit names must be strings");
        out.qubits.push_back(q.get<std::string>());
    }
    const std::size_t dim = dim_for_qubits(out.qubits.size());
    out.povd = POVD(dim);
    std::size_t index = 0;
    for (const auto& e : doc.at("entries")) {
        const std::string where = "entry " + std::to_string(index++);
        if (!e.is_object() || !e.contains("rho")) throw FormatError(where + ": missing 'rho'");
        ClassicalState sigma;
        if (e.contains("cstate")) {
            if (!e.at("cstate").is_object()) throw FormatError(where + ": 'cstate' must be an object");
            for (const auto& [k, v] : e.at("cstate").items()) {
                if (!v.is_number_integer()) throw FormatError(where + ": classical value of '" + k + "' is not an integer");
                sigma = sigma.updated(k, v.get<std::int64_t>());
            }
        }
        CMatrix rho;
        try {
            const auto& r = e.at("rho");
            if (r.is_string()) {
                rho = parse_matrix(r.get<std::string>());
            } else {
                // Nested arrays of reals, or of [re, im] pairs.
                std::vector<Complex> entries;
                std::size_t rows = 0;
                std::size_t cols = 0;
                for (const auto& row : r) {
                    std::size_t c = 0;
                    for (const auto& z : row) {
                        if (z.is_array()) entries.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
                        else entries.emplace_back(z.get<double>(), 0.0);
                        ++c;
                    }
                    if (rows == 0) cols = c;
                    if (c != cols) throw FormatError("ragged rows");
                    ++rows;
                }
                rho = CMatrix(rows, cols, std::move(entries));
            }
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception& ex) {
            throw FormatError(where + ": " + ex.what());
        }
        if (rho.rows() != dim || rho.cols() != dim) {
            throw FormatError(where + ": rho must be " + std::to_string(dim) + "x" + std::to_string(dim));
        }
        if (auto why = density_violation(rho); !why.empty()) throw FormatError(where + ": " + why);
        if (out.povd.contains(sigma)) throw FormatError(where + ": duplicate classical state " + sigma.fingerprint());
        out.povd.accumulate(sigma, rho);
    }
    if (total_mass(out.povd) > 1.0 + kEpsNum) throw FormatError("total mass exceeds 1");
    return out;
}

std::string povd_to_json(const POVD& mu, const std::vector<std::string>& qubits, int indent) {
    json doc;
    doc["qubits"] = qubits;
    doc["entries"] = json::array();
    for (const auto& [sigma, rho] : mu.entries()) {
        json cs = json::object();
        for (const auto& [k, v] : sigma.assignments()) cs[k] = v;
        doc["entries"].push_back({{"cstate", cs}, {"rho", format_matrix(rho)}});
    }
    return doc.dump(indent);
}

}  // namespace qimp
