#pragma once

// Test-only oracles and fixtures. Nothing here calls the kernels it is used
// to check; the dense and scalar-loop paths are written out longhand.

#include "evemb/gradcheck.hpp"
#include "evemb/model.hpp"
#include "evemb/objective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace evemb::testing {

#ifdef EVEMB_DATA_DIR
inline std::string data_path(const std::string &name)
{
	return std::string(EVEMB_DATA_DIR) + "/" + name;
}
#endif

inline Matrix random_matrix(Rng &rng, std::size_t r, std::size_t c, double lo = -0.5, double hi = 0.5)
{
	Matrix m(r, c);
	rng.fill_uniform(m.span(), lo, hi);
	return m;
}

inline Vector random_vector(Rng &rng, std::size_t n, double lo = -0.5, double hi = 0.5)
{
	Vector v(n);
	rng.fill_uniform(v.span(), lo, hi);
	return v;
}

// left * right + diag(t), formed entry by entry.
inline Matrix dense_slice(const LowRankSliceView &s)
{
	const std::size_t d = s.left.rows, n = s.left.cols;
	Matrix m(d, d);
	for (std::size_t i = 0; i < d; ++i)
		for (std::size_t j = 0; j < d; ++j) {
			double v = i == j ? s.diag[i] : 0.0;
			for (std::size_t r = 0; r < n; ++r)
				v += s.left(i, r) * s.right(r, j);
			m(i, j) = v;
		}
	return m;
}

inline double dense_bilinear(std::span<const double> a, const Matrix &m, std::span<const double> p)
{
	double s = 0.0;
	for (std::size_t i = 0; i < m.rows(); ++i)
		for (std::size_t j = 0; j < m.cols(); ++j)
			s += a[i] * m(i, j) * p[j];
	return s;
}

// Full neural tensor layer: tanh(x^T M_i y + W [x;y] + b).
inline Vector dense_ntn(const std::vector<Matrix> &slices, const Matrix &w, std::span<const double> b,
                        std::span<const double> x, std::span<const double> y)
{
	const std::size_t d = x.size();
	Vector out(slices.size());
	for (std::size_t i = 0; i < slices.size(); ++i) {
		double z = dense_bilinear(x, slices[i], y) + b[i];
		for (std::size_t j = 0; j < d; ++j)
			z += w(i, j) * x[j] + w(i, d + j) * y[j];
		out[i] = std::tanh(z);
	}
	return out;
}

inline double sigmoid_ref(double x)
{
	return 1.0 / (1.0 + std::exp(-x));
}

// Scalar-loop LSTM step on explicit gate matrices (order i, f, o, g).
inline void lstm_step_ref(const Matrix &w, std::span<const double> b, std::span<const double> x,
                          std::span<const double> h_prev, std::span<const double> c_prev, std::vector<double> &h,
                          std::vector<double> &c)
{
	const std::size_t hs = h_prev.size();
	const std::size_t in = x.size();
	std::vector<double> z(4 * hs);
	for (std::size_t r = 0; r < 4 * hs; ++r) {
		double s = b[r];
		for (std::size_t j = 0; j < in; ++j)
			s += w(r, j) * x[j];
		for (std::size_t j = 0; j < hs; ++j)
			s += w(r, in + j) * h_prev[j];
		z[r] = s;
	}
	h.assign(hs, 0.0);
	c.assign(hs, 0.0);
	for (std::size_t j = 0; j < hs; ++j) {
		const double i = sigmoid_ref(z[j]);
		const double f = sigmoid_ref(z[hs + j]);
		const double o = sigmoid_ref(z[2 * hs + j]);
		const double g = std::tanh(z[3 * hs + j]);
		c[j] = f * c_prev[j] + i * g;
		h[j] = o * std::tanh(c[j]);
	}
}

inline void randomize(ParameterStore &store, Rng &rng, double lo = -0.5, double hi = 0.5)
{
	for (auto &p : store.all())
		rng.fill_uniform(p.value.span(), lo, hi);
}

// Vocabulary w1..w<count>.
inline Vocabulary numbered_vocab(std::size_t count)
{
	Vocabulary v;
	for (std::size_t i = 1; i <= count; ++i)
		v.add("w" + std::to_string(i));
	return v;
}

inline std::vector<WordId> random_words(Rng &rng, std::size_t len, std::size_t vocab_size)
{
	std::vector<WordId> w(len);
	for (auto &id : w)
		id = static_cast<WordId>(1 + rng.uniform_index(vocab_size - 1));
	return w;
}

inline IndexedEvent random_event(Rng &rng, std::size_t vocab_size, std::size_t max_len = 2)
{
	return {random_words(rng, 1 + rng.uniform_index(max_len), vocab_size),
	        random_words(rng, 1 + rng.uniform_index(max_len), vocab_size),
	        random_words(rng, 1 + rng.uniform_index(max_len), vocab_size)};
}

// Gradient-check adapter over every array of a model. `loss` evaluates the
// scalar and, when given a buffer, accumulates its gradient there.
class ModelOp final : public DifferentiableOp {
public:
	using LossFn = std::function<double(const Model &, GradientBuffer *)>;

	ModelOp(Model &model, LossFn loss, std::vector<std::string> only = {})
		: model_(model), loss_(std::move(loss)), only_(std::move(only))
	{
	}

	double forward() override { return loss_(model_, nullptr); }

	void backward() override
	{
		GradientBuffer g(model_.store);
		loss_(model_, &g);
		dense_.clear();
		for (std::size_t i = 0; i < model_.store.size(); ++i)
			dense_.push_back(g.to_dense(ParamId{i}));
	}

	std::vector<ParamBinding> bindings() override
	{
		std::vector<ParamBinding> out;
		for (std::size_t i = 0; i < model_.store.size(); ++i) {
			auto &p = model_.store[ParamId{i}];
			if (!only_.empty() && std::find(only_.begin(), only_.end(), p.name) == only_.end())
				continue;
			out.push_back({p.name, p.value.span(), dense_[i].span()});
		}
		return out;
	}

private:
	Model &model_;
	LossFn loss_;
	std::vector<std::string> only_;
	std::vector<Matrix> dense_;
};

} // namespace evemb::testing
