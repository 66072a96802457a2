#include "qimp/qmath.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace qimp {

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix entry count does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
}

CMatrix CMatrix::identity(std::size_t dim) {
    CMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::basis_op(std::size_t dim, std::size_t i, std::size_t j) {
    CMatrix m(dim, dim);
    m(i, j) = 1.0;
    return m;
}

CMatrix CMatrix::projector(std::span<const Complex> v) {
    CMatrix m(v.size(), v.size());
    for (std::size_t r = 0; r < v.size(); ++r)
        for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r] * std::conj(v[c]);
    return m;
}

static void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    require_same_shape(*this, o, "add");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    require_same_shape(*this, o, "subtract");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
}

Complex CMatrix::trace() const {
    Complex t{};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

bool CMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("multiply: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + ")");
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac)
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = a(ar, ac) * b(br, bc);
    return out;
}

CMatrix adjoint(const CMatrix& a) {
    CMatrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = std::conj(a(r, c));
    return out;
}

CMatrix conjugate_by(const CMatrix& m, const CMatrix& rho) {
    if (!rho.square() || m.cols() != rho.rows()) {
        throw DimensionError("conjugate_by: operator is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " but state is " + std::to_string(rho.rows()) + "x" +
                             std::to_string(rho.cols()));
    }
    return m * rho * adjoint(m);
}

double max_norm_distance(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "compare");
    double d = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) d = std::max(d, std::abs(ea[k] - eb[k]));
    return d;
}

bool approx_equal(const CMatrix& a, const CMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return max_norm_distance(a, b) <= tol;
}

bool is_hermitian(const CMatrix& a, double tol) {
    return a.square() && max_norm_distance(a, adjoint(a)) <= tol;
}

bool is_unitary(const CMatrix& a, double tol) {
    return a.square() && approx_equal(a * adjoint(a), CMatrix::identity(a.rows()), tol);
}

std::vector<double> hermitian_eigenvalues(const CMatrix& a) {
    if (!a.square()) throw DimensionError("eigenvalues of a non-square matrix");
    const std::size_t n = a.rows();
    const std::size_t m = 2 * n;
    // Real symmetric embedding; each eigenvalue of `a` appears twice.
    std::vector<double> s(m * m, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return s[r * m + c]; };
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const Complex h = 0.5 * (a(r, c) + std::conj(a(c, r)));
            at(r, c) = h.real();
            at(r + n, c + n) = h.real();
            at(r, c + n) = -h.imag();
            at(r + n, c) = h.imag();
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - sn * akq;
                    at(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - sn * aqk;
                    at(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> diag(m);
    for (std::size_t k = 0; k < m; ++k) diag[k] = at(k, k);
    std::sort(diag.begin(), diag.end());
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < m; k += 2) out.push_back(0.5 * (diag[k] + diag[k + 1]));
    return out;
}

double min_eigenvalue(const CMatrix& a) {
    auto ev = hermitian_eigenvalues(a);
    return ev.empty() ? 0.0 : ev.front();
}

bool is_psd(const CMatrix& a, double tol) { return is_hermitian(a, tol) && min_eigenvalue(a) >= -tol; }

bool loewner_leq(const CMatrix& a, const CMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("loewner_leq: dimension mismatch");
    }
    if (!is_hermitian(a, tol) || !is_hermitian(b, tol)) {
        throw std::invalid_argument("loewner_leq: operands must be Hermitian");
    }
    return min_eigenvalue(b - a) >= -tol;
}

std::size_t qubits_for_dim(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    return n;
}

CMatrix embed(const CMatrix& op, std::span<const std::size_t> targets, std::size_t total_qubits) {
    const std::size_t k = targets.size();
    if (!op.square() || op.rows() != dim_for_qubits(k)) {
        throw DimensionError("embed: operator dimension " + std::to_string(op.rows()) + " does not act on " +
                             std::to_string(k) + " qubit(s)");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (targets[i] >= total_qubits) {
            throw std::out_of_range("embed: target qubit " + std::to_string(targets[i]) + " out of range");
        }
        for (std::size_t j = i + 1; j < k; ++j)
            if (targets[i] == targets[j]) throw std::invalid_argument("embed: repeated target qubit");
    }
    const std::size_t dim = dim_for_qubits(total_qubits);
    std::size_t target_mask = 0;
    for (auto t : targets) target_mask |= std::size_t{1} << (total_qubits - 1 - t);

    auto local_index = [&](std::size_t global) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t bit = (global >> (total_qubits - 1 - targets[i])) & 1U;
            idx |= bit << (k - 1 - i);
        }
        return idx;
    };

    CMatrix out(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if ((r & ~target_mask) != (c & ~target_mask)) continue;
            out(r, c) = op(local_index(r), local_index(c));
        }
    }
    return out;
}

std::string density_violation(const CMatrix& m, double tol) {
    if (!m.square()) return "not square";
    if (!m.all_finite()) return "non-finite entry";
    if (!is_hermitian(m, tol)) return "not Hermitian";
    const double ev = min_eigenvalue(m);
    if (ev < -tol) return "not positive semidefinite (min eigenvalue " + std::to_string(ev) + ")";
    if (m.trace().real() > 1.0 + tol) return "trace exceeds 1";
    return {};
}

PartialDensityOp::PartialDensityOp(CMatrix mat) : mat_(std::move(mat)) {
    if (auto why = density_violation(mat_); !why.empty()) {
        throw std::invalid_argument("invalid partial density operator: " + why);
    }
}

UnitaryGate::UnitaryGate(std::size_t arity_, CMatrix mat_) : arity(arity_), mat(std::move(mat_)) {
    if (!mat.square() || mat.rows() != dim_for_qubits(arity)) {
        throw DimensionError("gate matrix does not match arity " + std::to_string(arity));
    }
    if (!is_unitary(mat)) throw std::invalid_argument("gate matrix is not unitary");
}

GeneralMeasurement::GeneralMeasurement(std::size_t arity_, std::vector<CMatrix> ops, std::vector<Label> lbls)
    : arity(arity_), operators(std::move(ops)), labels(std::move(lbls)) {
    if (labels.size() != operators.size()) {
        throw std::invalid_argument("measurement labelling is not total on the operator set");
    }
    for (const auto& op : operators) {
        if (!op.square() || op.rows() != dim_for_qubits(arity)) {
            throw DimensionError("measurement operator does not match arity " + std::to_string(arity));
        }
    }
    for (const auto& l : labels) {
        if (l.size() != label_width()) throw std::invalid_argument("measurement labels have mixed widths");
    }
}

GeneralMeasurement GeneralMeasurement::with_index_labels(std::size_t arity, std::vector<CMatrix> operators) {
    std::vector<Label> labels;
    for (std::size_t i = 0; i < operators.size(); ++i) labels.push_back({static_cast<std::int64_t>(i)});
    return GeneralMeasurement(arity, std::move(operators), std::move(labels));
}

bool check_measurement(const GeneralMeasurement& m, double tol) {
    const std::size_t dim = dim_for_qubits(m.arity);
    CMatrix sum(dim, dim);
    for (const auto& op : m.operators) sum += adjoint(op) * op;
    return approx_equal(sum, CMatrix::identity(dim), tol);
}

GeneralMeasurement embed(const GeneralMeasurement& m, std::span<const std::size_t> targets,
                         std::size_t total_qubits) {
    std::vector<CMatrix> ops;
    ops.reserve(m.size());
    for (const auto& op : m.operators) ops.push_back(embed(op, targets, total_qubits));
    return GeneralMeasurement(total_qubits, std::move(ops), m.labels);
}

namespace gates {

const CMatrix& I() {
    static const CMatrix m = CMatrix::identity(2);
    return m;
}

const CMatrix& H() {
    static const CMatrix m = [] {
        const double s = std::numbers::sqrt2 / 2.0;
        return CMatrix(2, 2, {s, s, s, -s});
    }();
    return m;
}

const CMatrix& X() {
    static const CMatrix m(2, 2, {0.0, 1.0, 1.0, 0.0});
    return m;
}

const CMatrix& Z() {
    static const CMatrix m(2, 2, {1.0, 0.0, 0.0, -1.0});
    return m;
}

const CMatrix& CNOT() {
    static const CMatrix m(4, 4, {1, 0, 0, 0,  //
                                  0, 1, 0, 0,  //
                                  0, 0, 0, 1,  //
                                  0, 0, 1, 0});
    return m;
}

const GeneralMeasurement& computational() {
    static const GeneralMeasurement m =
        GeneralMeasurement::with_index_labels(1, {CMatrix::basis_op(2, 0, 0), CMatrix::basis_op(2, 1, 1)});
    return m;
}

}  // namespace gates

// --- literal parsing ---

namespace {

class Scanner {
public:
    explicit Scanner(std::string_view s) : s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw LiteralError("matrix literal: " + msg + " at offset " + std::to_string(pos_), pos_);
    }

    // value := term [sign term], term := number ['i'] | 'i'
    Complex complex_value() {
        Complex z{};
        for (int terms = 0; terms < 2; ++terms) {
            skip_ws();
            double sign = 1.0;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                sign = s_[pos_] == '-' ? -1.0 : 1.0;
                ++pos_;
                skip_ws();
            } else if (terms > 0) {
                break;
            }
            double mag = 1.0;
            bool have_number = false;
            if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
                auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), mag);
                if (res.ec != std::errc{}) fail("bad number");
                pos_ = static_cast<std::size_t>(res.ptr - s_.data());
                have_number = true;
            }
            if (pos_ < s_.size() && s_[pos_] == 'i') {
                ++pos_;
                z += Complex{0.0, sign * mag};
            } else if (have_number) {
                z += Complex{sign * mag, 0.0};
            } else {
                fail("expected a number");
            }
        }
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail("non-finite entry");
        return z;
    }

    std::size_t pos() const { return pos_; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

CMatrix parse_matrix(std::string_view text) {
    Scanner sc(text);
    sc.expect('[');
    std::vector<std::vector<Complex>> rows;
    do {
        sc.expect('[');
        std::vector<Complex> row;
        if (sc.peek() != ']') {
            do {
                row.push_back(sc.complex_value());
            } while (sc.accept(','));
        }
        sc.expect(']');
        rows.push_back(std::move(row));
    } while (sc.accept(','));
    sc.expect(']');
    if (!sc.at_end()) sc.fail("trailing characters");
    if (rows.empty() || rows.front().empty()) sc.fail("empty matrix");
    const std::size_t cols = rows.front().size();
    std::vector<Complex> entries;
    for (const auto& r : rows) {
        if (r.size() != cols) sc.fail("ragged rows");
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return CMatrix(rows.size(), cols, std::move(entries));
}

Complex parse_complex(std::string_view text) {
    Scanner sc(text);
    Complex z = sc.complex_value();
    if (!sc.at_end()) sc.fail("trailing characters");
    return z;
}

static std::string format_real(double x, int digits) {
    if (digits < 17 && std::abs(x) < 1e-12) x = 0.0;
    if (x == 0.0) x = 0.0;  // drops the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string format_complex(Complex z, FormatOptions opt) {
    double re = z.real();
    double im = z.imag();
    if (opt.digits < 17) {
        if (std::abs(re) < 1e-12) re = 0.0;
        if (std::abs(im) < 1e-12) im = 0.0;
    }
    if (im == 0.0) return format_real(re, opt.digits);
    std::string ims = format_real(std::abs(im), opt.digits) + "i";
    if (re == 0.0) return (im < 0 ? "-" : "") + ims;
    return format_real(re, opt.digits) + (im < 0 ? "-" : "+") + ims;
}

std::string format_matrix(const CMatrix& m, FormatOptions opt) {
    std::ostringstream os;
    os << '[';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) os << ", ";
        os << '[';
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << ", ";
            os << format_complex(m(r, c), opt);
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

}  // namespace qimp
