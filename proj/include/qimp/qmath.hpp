#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qimp {

using Complex = std::complex<double>;

/// Tolerance for every equality, PSD and completeness check.
inline constexpr double kEpsNum = 1e-9;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static CMatrix zero(std::size_t dim) { return CMatrix(dim, dim); }
    static CMatrix identity(std::size_t dim);
    /// |i><j| in a space of dimension dim.
    static CMatrix basis_op(std::size_t dim, std::size_t i, std::size_t j);
    /// |v><v|
    static CMatrix projector(std::span<const Complex> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(Complex s);

    Complex trace() const;
    double max_abs() const;
    bool all_finite() const;

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix a);

CMatrix tensor(const CMatrix& a, const CMatrix& b);
CMatrix adjoint(const CMatrix& a);
/// m * rho * m^dagger
CMatrix conjugate_by(const CMatrix& m, const CMatrix& rho);

/// Max-norm distance; throws DimensionError on shape mismatch.
double max_norm_distance(const CMatrix& a, const CMatrix& b);
bool approx_equal(const CMatrix& a, const CMatrix& b, double tol = kEpsNum);

bool is_hermitian(const CMatrix& a, double tol = kEpsNum);
bool is_unitary(const CMatrix& a, double tol = kEpsNum);

/// Eigenvalues of a Hermitian matrix in ascending order (Jacobi sweeps on the
/// real symmetric embedding [[Re, -Im], [Im, Re]]).
std::vector<double> hermitian_eigenvalues(const CMatrix& a);
double min_eigenvalue(const CMatrix& a);

bool is_psd(const CMatrix& a, double tol = kEpsNum);

/// Loewner order a <= b, i.e. b - a is positive semidefinite.
bool loewner_leq(const CMatrix& a, const CMatrix& b, double tol = kEpsNum);

/// Number of qubits n with 2^n == dim; throws if dim is not a power of two.
std::size_t qubits_for_dim(std::size_t dim);
inline std::size_t dim_for_qubits(std::size_t n) { return std::size_t{1} << n; }

/// Lifts op (acting on `targets`, first target = most significant local bit)
/// into the space of total_qubits qubits. Qubit 0 is the leftmost tensor factor.
CMatrix embed(const CMatrix& op, std::span<const std::size_t> targets, std::size_t total_qubits);

/// Partial density operator: Hermitian, PSD, trace <= 1.
class PartialDensityOp {
public:
    /// Validates the invariants; throws std::invalid_argument with the reason.
    explicit PartialDensityOp(CMatrix mat);

    std::size_t dim() const noexcept { return mat_.rows(); }
    const CMatrix& matrix() const noexcept { return mat_; }
    double trace() const { return mat_.trace().real(); }

private:
    CMatrix mat_;
};

/// Returns an empty string if m is a valid partial density operator, otherwise the reason.
std::string density_violation(const CMatrix& m, double tol = kEpsNum);

using Label = std::vector<std::int64_t>;

struct UnitaryGate {
    std::size_t arity = 0;
    CMatrix mat;

    UnitaryGate() = default;
    UnitaryGate(std::size_t arity, CMatrix mat);
};

/// Measurement operators with a labelling; labels are integer tuples so that
/// composed measurements can carry paired outcomes.
struct GeneralMeasurement {
    std::size_t arity = 0;
    std::vector<CMatrix> operators;
    std::vector<Label> labels;

    GeneralMeasurement() = default;
    GeneralMeasurement(std::size_t arity, std::vector<CMatrix> operators, std::vector<Label> labels);

    /// Identity labelling: operator i gets label {i}.
    static GeneralMeasurement with_index_labels(std::size_t arity, std::vector<CMatrix> operators);

    std::size_t size() const noexcept { return operators.size(); }
    /// Width of each label; 0 for an empty measurement.
    std::size_t label_width() const noexcept { return labels.empty() ? 0 : labels.front().size(); }
};

bool check_measurement(const GeneralMeasurement& m, double tol = kEpsNum);

GeneralMeasurement embed(const GeneralMeasurement& m, std::span<const std::size_t> targets,
                         std::size_t total_qubits);

namespace gates {
const CMatrix& I();
const CMatrix& H();
const CMatrix& X();
const CMatrix& Z();
const CMatrix& CNOT();
/// Single-qubit computational basis measurement {|0><0|, |1><1|} labelled 0, 1.
const GeneralMeasurement& computational();
}  // namespace gates

// --- matrix literal text format: [[re+imi, ...], ...] ---

class LiteralError : public std::runtime_error {
public:
    LiteralError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Parses a matrix literal; throws LiteralError with the byte offset.
CMatrix parse_matrix(std::string_view text);
/// Parses a single complex scalar such as "1", "-0.5i", "0.5-2e-3i".
Complex parse_complex(std::string_view text);

struct FormatOptions {
    /// Significant digits; 17 gives an exact round-trip.
    int digits = 17;
};

std::string format_complex(Complex z, FormatOptions opt = {});
std::string format_matrix(const CMatrix& m, FormatOptions opt = {});

}  // namespace qimp
