#include "evemb/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace evemb {

void require_dim(const char *what, std::size_t expected, std::size_t actual)
{
	if (expected != actual)
		throw DimensionError(std::string(what) + ": expected " + std::to_string(expected) + ", got " +
		                     std::to_string(actual));
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
	: rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size())
{
	data_.reserve(rows_ * cols_);
	for (const auto &r : rows) {
		require_dim("matrix row length", cols_, r.size());
		data_.insert(data_.end(), r.begin(), r.end());
	}
}

double dot(std::span<const double> a, std::span<const double> b)
{
	require_dim("dot operand length", a.size(), b.size());
	double s = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i)
		s += a[i] * b[i];
	return s;
}

double squared_norm(std::span<const double> a)
{
	double s = 0.0;
	for (double v : a)
		s += v * v;
	return s;
}

void fill_zero(std::span<double> a) noexcept
{
	std::fill(a.begin(), a.end(), 0.0);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
	require_dim("axpy operand length", y.size(), x.size());
	for (std::size_t i = 0; i < x.size(); ++i)
		y[i] += alpha * x[i];
}

void gemv(ConstMatrixView m, std::span<const double> x, std::span<double> y)
{
	require_dim("gemv input length", m.cols, x.size());
	require_dim("gemv output length", m.rows, y.size());
	for (std::size_t r = 0; r < m.rows; ++r) {
		double s = 0.0;
		const auto row = m.row(r);
		for (std::size_t c = 0; c < m.cols; ++c)
			s += row[c] * x[c];
		y[r] = s;
	}
}

void gemv_t_add(ConstMatrixView m, std::span<const double> x, std::span<double> y)
{
	require_dim("gemv_t input length", m.rows, x.size());
	require_dim("gemv_t output length", m.cols, y.size());
	for (std::size_t r = 0; r < m.rows; ++r) {
		const double xr = x[r];
		if (xr == 0.0)
			continue;
		const auto row = m.row(r);
		for (std::size_t c = 0; c < m.cols; ++c)
			y[c] += row[c] * xr;
	}
}

void ger_add(double alpha, std::span<const double> x, std::span<const double> y, MatrixView m)
{
	require_dim("ger rows", m.rows, x.size());
	require_dim("ger cols", m.cols, y.size());
	for (std::size_t r = 0; r < m.rows; ++r) {
		const double s = alpha * x[r];
		if (s == 0.0)
			continue;
		auto row = m.row(r);
		for (std::size_t c = 0; c < m.cols; ++c)
			row[c] += s * y[c];
	}
}

bool all_finite(std::span<const double> a) noexcept
{
	return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

LowRankSlice::LowRankSlice(std::size_t d, std::size_t n) : left(d, n), right(n, d), diag(d)
{
	validate_slice(view());
}

LowRankSlice::LowRankSlice(Matrix l, Matrix r, Vector t) : left(std::move(l)), right(std::move(r)), diag(std::move(t))
{
	validate_slice(view());
}

void validate_slice(LowRankSliceView slice)
{
	const std::size_t d = slice.left.rows;
	const std::size_t n = slice.left.cols;
	if (n < 1 || n > d)
		throw DimensionError("slice rank: expected 1 <= n <= d (d=" + std::to_string(d) + "), got " + std::to_string(n));
	require_dim("slice right factor rows (n)", n, slice.right.rows);
	require_dim("slice right factor cols (d)", d, slice.right.cols);
	require_dim("slice diagonal length (d)", d, slice.diag.size());
}

double bilinear_lowrank(std::span<const double> a, std::span<const double> p, LowRankSliceView slice,
                        std::span<double> left_a, std::span<double> right_p)
{
	validate_slice(slice);
	const std::size_t d = slice.left.rows;
	const std::size_t n = slice.left.cols;
	require_dim("bilinear left operand length (d)", d, a.size());
	require_dim("bilinear right operand length (d)", d, p.size());

	double local_u[16];
	double local_v[16];
	std::vector<double> heap;
	if (left_a.empty() || right_p.empty()) {
		if (n <= 16) {
			left_a = {local_u, n};
			right_p = {local_v, n};
		} else {
			heap.assign(2 * n, 0.0);
			left_a = {heap.data(), n};
			right_p = {heap.data() + n, n};
		}
	}
	require_dim("bilinear intermediate length (n)", n, left_a.size());
	require_dim("bilinear intermediate length (n)", n, right_p.size());

	fill_zero(left_a);
	gemv_t_add(slice.left, a, left_a);
	gemv(slice.right, p, right_p);

	double value = 0.0;
	for (std::size_t m = 0; m < n; ++m)
		value += left_a[m] * right_p[m];
	for (std::size_t i = 0; i < d; ++i)
		value += a[i] * slice.diag[i] * p[i];
	return value;
}

void bilinear_lowrank_backward(std::span<const double> a, std::span<const double> p, LowRankSliceView slice,
                               std::span<const double> left_a, std::span<const double> right_p, double upstream,
                               LowRankSliceGradView grad, std::span<double> da, std::span<double> dp)
{
	const std::size_t d = slice.left.rows;
	const std::size_t n = slice.left.cols;
	require_dim("bilinear gradient left operand length (d)", d, da.size());
	require_dim("bilinear gradient right operand length (d)", d, dp.size());
	if (upstream == 0.0)
		return;

	// value = (left^T a) . (right p) + sum_i a_i t_i p_i
	ger_add(upstream, a, right_p, grad.left);
	ger_add(upstream, left_a, p, grad.right);
	for (std::size_t i = 0; i < d; ++i) {
		grad.diag[i] += upstream * a[i] * p[i];
		da[i] += upstream * slice.diag[i] * p[i];
		dp[i] += upstream * a[i] * slice.diag[i];
	}
	for (std::size_t i = 0; i < d; ++i) {
		const auto lrow = slice.left.row(i);
		double s = 0.0;
		for (std::size_t m = 0; m < n; ++m)
			s += lrow[m] * right_p[m];
		da[i] += upstream * s;
	}
	for (std::size_t m = 0; m < n; ++m) {
		const double s = upstream * left_a[m];
		const auto rrow = slice.right.row(m);
		for (std::size_t j = 0; j < d; ++j)
			dp[j] += s * rrow[j];
	}
}

Vector affine_tanh(std::span<const double> x, ConstMatrixView w, std::span<const double> b,
                   std::span<const double> bilinear)
{
	require_dim("affine weight cols (input length)", w.cols, x.size());
	require_dim("affine bias length", w.rows, b.size());
	require_dim("affine bilinear term length", w.rows, bilinear.size());
	Vector out(w.rows);
	gemv(w, x, out);
	for (std::size_t i = 0; i < w.rows; ++i)
		out[i] = std::tanh(out[i] + bilinear[i] + b[i]);
	return out;
}

void affine_tanh_backward(std::span<const double> x, ConstMatrixView w, std::span<const double> out,
                          std::span<const double> dout, std::span<double> dz, MatrixView dw, std::span<double> db,
                          std::span<double> dx)
{
	require_dim("affine output length", w.rows, out.size());
	require_dim("affine upstream length", w.rows, dout.size());
	require_dim("affine dz length", w.rows, dz.size());
	require_dim("affine dx length", w.cols, dx.size());
	for (std::size_t i = 0; i < w.rows; ++i)
		dz[i] = dout[i] * (1.0 - out[i] * out[i]);
	ger_add(1.0, dz, x, dw);
	axpy(1.0, dz, db);
	gemv_t_add(w, dz, dx);
}

double sigmoid(double x) noexcept
{
	if (x >= 0.0)
		return 1.0 / (1.0 + std::exp(-x));
	const double e = std::exp(x);
	return e / (1.0 + e);
}

} // namespace evemb
