#pragma once

// Dense double-precision vectors and matrices, non-owning views over them,
// and the small set of kernels the composition and recurrent layers need.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evemb {

class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
	using Error::Error;
};

// Throws DimensionError("<what>: expected <expected>, got <actual>") on mismatch.
void require_dim(const char *what, std::size_t expected, std::size_t actual);

class Vector {
public:
	Vector() = default;
	explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
	Vector(std::initializer_list<double> values) : data_(values) {}
	explicit Vector(std::span<const double> values) : data_(values.begin(), values.end()) {}

	std::size_t size() const noexcept { return data_.size(); }
	double &operator[](std::size_t i) noexcept { return data_[i]; }
	double operator[](std::size_t i) const noexcept { return data_[i]; }
	double *data() noexcept { return data_.data(); }
	const double *data() const noexcept { return data_.data(); }
	auto begin() noexcept { return data_.begin(); }
	auto end() noexcept { return data_.end(); }
	auto begin() const noexcept { return data_.begin(); }
	auto end() const noexcept { return data_.end(); }

	std::span<double> span() noexcept { return data_; }
	std::span<const double> span() const noexcept { return data_; }
	operator std::span<double>() noexcept { return data_; }
	operator std::span<const double>() const noexcept { return data_; }

	bool operator==(const Vector &) const = default;

private:
	std::vector<double> data_;
};

struct ConstMatrixView {
	std::span<const double> data;
	std::size_t rows = 0;
	std::size_t cols = 0;

	double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
	std::span<const double> row(std::size_t r) const noexcept { return data.subspan(r * cols, cols); }
};

struct MatrixView {
	std::span<double> data;
	std::size_t rows = 0;
	std::size_t cols = 0;

	double &operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
	std::span<double> row(std::size_t r) const noexcept { return data.subspan(r * cols, cols); }
	operator ConstMatrixView() const noexcept { return {data, rows, cols}; }
};

// Row-major matrix with dimensions fixed at construction.
class Matrix {
public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
		: rows_(rows), cols_(cols), data_(rows * cols, fill) {}
	Matrix(std::initializer_list<std::initializer_list<double>> rows);

	std::size_t rows() const noexcept { return rows_; }
	std::size_t cols() const noexcept { return cols_; }
	std::size_t size() const noexcept { return data_.size(); }

	double &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
	double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

	std::span<double> span() noexcept { return data_; }
	std::span<const double> span() const noexcept { return data_; }
	std::span<double> row(std::size_t r) noexcept { return span().subspan(r * cols_, cols_); }
	std::span<const double> row(std::size_t r) const noexcept { return span().subspan(r * cols_, cols_); }

	MatrixView view() noexcept { return {data_, rows_, cols_}; }
	ConstMatrixView view() const noexcept { return {data_, rows_, cols_}; }
	operator ConstMatrixView() const noexcept { return view(); }

	bool operator==(const Matrix &) const = default;

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
void fill_zero(std::span<double> a) noexcept;
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = M x
void gemv(ConstMatrixView m, std::span<const double> x, std::span<double> y);
// y += M^T x
void gemv_t_add(ConstMatrixView m, std::span<const double> x, std::span<double> y);
// M += alpha * x y^T
void ger_add(double alpha, std::span<const double> x, std::span<const double> y, MatrixView m);

bool all_finite(std::span<const double> a) noexcept;

// One slice of a low-rank bilinear tensor: left * right + diag(diag).
struct LowRankSliceView {
	ConstMatrixView left;  // d x n
	ConstMatrixView right; // n x d
	std::span<const double> diag;
};

struct LowRankSliceGradView {
	MatrixView left;
	MatrixView right;
	std::span<double> diag;
};

struct LowRankSlice {
	Matrix left;
	Matrix right;
	Vector diag;

	LowRankSlice(std::size_t d, std::size_t n);
	LowRankSlice(Matrix left, Matrix right, Vector diag);

	std::size_t dim() const noexcept { return left.rows(); }
	std::size_t rank() const noexcept { return left.cols(); }
	LowRankSliceView view() const noexcept { return {left.view(), right.view(), diag.span()}; }
};

void validate_slice(LowRankSliceView slice);

// a^T (left*right + diag) p without forming the d x d matrix. When the
// intermediates are requested, left^T a and right p are written to them.
double bilinear_lowrank(std::span<const double> a, std::span<const double> p, LowRankSliceView slice,
                        std::span<double> left_a = {}, std::span<double> right_p = {});

// Accumulates upstream * d(value)/d(.) into the slice gradient and into da, dp.
// left_a and right_p are the intermediates from the forward call.
void bilinear_lowrank_backward(std::span<const double> a, std::span<const double> p, LowRankSliceView slice,
                               std::span<const double> left_a, std::span<const double> right_p, double upstream,
                               LowRankSliceGradView grad, std::span<double> da, std::span<double> dp);

// tanh(bilinear + W x + b)
Vector affine_tanh(std::span<const double> x, ConstMatrixView w, std::span<const double> b,
                   std::span<const double> bilinear);

// Given out = affine_tanh(...) and dL/dout, accumulates dW, db, dx and writes
// dL/d(pre-activation) into dz (also dL/dbilinear).
void affine_tanh_backward(std::span<const double> x, ConstMatrixView w, std::span<const double> out,
                          std::span<const double> dout, std::span<double> dz, MatrixView dw, std::span<double> db,
                          std::span<double> dx);

double sigmoid(double x) noexcept;

} // namespace evemb
