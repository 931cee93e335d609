#include "evemb/intent.hpp"

#include <algorithm>
#include <cmath>

namespace evemb {

LstmCell LstmCell::create(ParameterStore &store, const std::string &prefix, std::size_t input, std::size_t hidden)
{
	if (hidden == 0 || input == 0)
		throw DimensionError(prefix + ": LSTM input and hidden sizes must be positive");
	LstmCell cell;
	cell.input = input;
	cell.hidden = hidden;
	cell.weight = store.add(prefix + ".W", 4 * hidden, input + hidden);
	cell.bias = store.add(prefix + ".b", 4 * hidden, 1);
	return cell;
}

void LstmCell::initialize(ParameterStore &store, Rng &rng) const
{
	const double r = 1.0 / std::sqrt(static_cast<double>(hidden));
	rng.fill_uniform(store[weight].value.span(), -r, r);
	fill_zero(store[bias].value.span());
}

void lstm_step(const ParameterStore &store, const LstmCell &cell, std::span<const double> x,
               std::span<const double> h_prev, std::span<const double> c_prev, LstmStepCache &cache)
{
	const std::size_t h = cell.hidden;
	require_dim("lstm input length", cell.input, x.size());
	require_dim("lstm previous hidden length", h, h_prev.size());
	require_dim("lstm previous cell length", h, c_prev.size());

	cache.xh = Vector(cell.input + h);
	std::copy(x.begin(), x.end(), cache.xh.begin());
	std::copy(h_prev.begin(), h_prev.end(), cache.xh.begin() + static_cast<std::ptrdiff_t>(cell.input));
	cache.c_prev = Vector(c_prev);

	cache.gates = Vector(4 * h);
	gemv(store[cell.weight].value, cache.xh, cache.gates);
	const auto b = store[cell.bias].value.span();
	for (std::size_t j = 0; j < 4 * h; ++j) {
		const double z = cache.gates[j] + b[j];
		cache.gates[j] = j < 3 * h ? sigmoid(z) : std::tanh(z);
	}

	cache.c = Vector(h);
	cache.tanh_c = Vector(h);
	cache.h = Vector(h);
	for (std::size_t j = 0; j < h; ++j) {
		const double i = cache.gates[j];
		const double f = cache.gates[h + j];
		const double o = cache.gates[2 * h + j];
		const double g = cache.gates[3 * h + j];
		cache.c[j] = f * c_prev[j] + i * g;
		cache.tanh_c[j] = std::tanh(cache.c[j]);
		cache.h[j] = o * cache.tanh_c[j];
	}
}

void lstm_step_backward(const ParameterStore &store, const LstmCell &cell, const LstmStepCache &cache,
                        std::span<const double> dh, std::span<const double> dc, GradientBuffer &grads,
                        std::span<double> dx, std::span<double> dh_prev, std::span<double> dc_prev)
{
	const std::size_t h = cell.hidden;
	require_dim("lstm upstream hidden length", h, dh.size());
	require_dim("lstm upstream cell length", h, dc.size());
	require_dim("lstm dx length", cell.input, dx.size());
	require_dim("lstm dh_prev length", h, dh_prev.size());
	require_dim("lstm dc_prev length", h, dc_prev.size());

	Vector dz(4 * h);
	for (std::size_t j = 0; j < h; ++j) {
		const double i = cache.gates[j];
		const double f = cache.gates[h + j];
		const double o = cache.gates[2 * h + j];
		const double g = cache.gates[3 * h + j];
		const double tc = cache.tanh_c[j];
		const double dct = dc[j] + dh[j] * o * (1.0 - tc * tc);
		dz[j] = dct * g * i * (1.0 - i);
		dz[h + j] = dct * cache.c_prev[j] * f * (1.0 - f);
		dz[2 * h + j] = dh[j] * tc * o * (1.0 - o);
		dz[3 * h + j] = dct * i * (1.0 - g * g);
		dc_prev[j] = dct * f;
	}
	ger_add(1.0, dz, cache.xh, grads.dense(cell.weight));
	axpy(1.0, dz, grads.dense(cell.bias).data);
	Vector dxh(cell.input + h);
	gemv_t_add(store[cell.weight].value, dz, dxh);
	std::copy(dxh.begin(), dxh.begin() + static_cast<std::ptrdiff_t>(cell.input), dx.begin());
	std::copy(dxh.begin() + static_cast<std::ptrdiff_t>(cell.input), dxh.end(), dh_prev.begin());
}

BiLstmEncoder BiLstmEncoder::create(ParameterStore &store, std::size_t input, std::size_t hidden)
{
	return {LstmCell::create(store, "intent.forward", input, hidden),
	        LstmCell::create(store, "intent.backward", input, hidden)};
}

IntentForward encode_intent_forward(const ParameterStore &store, const BiLstmEncoder &encoder, ParamId embedding,
                                    std::span<const WordId> words)
{
	if (words.empty())
		throw Error("cannot encode an empty intent");
	const ConstMatrixView table = store[embedding].value;
	for (WordId w : words)
		if (w >= table.rows)
			throw DimensionError("intent word id " + std::to_string(w) + " outside embedding table");

	const std::size_t n = words.size();
	IntentForward out;
	out.forward_steps.resize(n);
	out.backward_steps.resize(n);

	Vector h(encoder.forward.hidden), c(encoder.forward.hidden);
	for (std::size_t t = 0; t < n; ++t) {
		auto &step = out.forward_steps[t];
		lstm_step(store, encoder.forward, table.row(words[t]), h, c, step);
		h = step.h;
		c = step.c;
	}
	const Vector forward_final = h;

	h = Vector(encoder.backward.hidden);
	c = Vector(encoder.backward.hidden);
	for (std::size_t t = 0; t < n; ++t) {
		auto &step = out.backward_steps[t];
		lstm_step(store, encoder.backward, table.row(words[n - 1 - t]), h, c, step);
		h = step.h;
		c = step.c;
	}

	out.encoding = Vector(encoder.width());
	std::copy(forward_final.begin(), forward_final.end(), out.encoding.begin());
	std::copy(h.begin(), h.end(), out.encoding.begin() + static_cast<std::ptrdiff_t>(forward_final.size()));
	return out;
}

Vector encode_intent(const ParameterStore &store, const BiLstmEncoder &encoder, ParamId embedding,
                     std::span<const WordId> words)
{
	return encode_intent_forward(store, encoder, embedding, words).encoding;
}

namespace {

// Runs BPTT over one direction; steps[t] consumed word order[t].
void backprop_direction(const ParameterStore &store, const LstmCell &cell, ParamId embedding,
                        const std::vector<LstmStepCache> &steps, std::span<const WordId> words, bool reversed,
                        std::span<const double> dfinal, GradientBuffer &grads)
{
	const std::size_t n = steps.size();
	Vector dh(dfinal), dc(cell.hidden), dx(cell.input), dh_prev(cell.hidden), dc_prev(cell.hidden);
	for (std::size_t t = n; t-- > 0;) {
		lstm_step_backward(store, cell, steps[t], dh, dc, grads, dx, dh_prev, dc_prev);
		const WordId w = words[reversed ? n - 1 - t : t];
		axpy(1.0, dx, grads.row(embedding, w));
		dh = dh_prev;
		dc = dc_prev;
	}
}

} // namespace

void encode_intent_backward(const ParameterStore &store, const BiLstmEncoder &encoder, ParamId embedding,
                            std::span<const WordId> words, const IntentForward &fwd, std::span<const double> dv,
                            GradientBuffer &grads)
{
	require_dim("intent upstream length", encoder.width(), dv.size());
	const std::size_t hf = encoder.forward.hidden;
	backprop_direction(store, encoder.forward, embedding, fwd.forward_steps, words, false, dv.first(hf), grads);
	backprop_direction(store, encoder.backward, embedding, fwd.backward_steps, words, true, dv.subspan(hf), grads);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v)
{
	require_dim("cosine operand length", u.size(), v.size());
	const double nu = std::sqrt(squared_norm(u));
	const double nv = std::sqrt(squared_norm(v));
	return dot(u, v) / (nu * nv + kCosineEpsilon);
}

void cosine_similarity_backward(std::span<const double> u, std::span<const double> v, double upstream,
                                std::span<double> du, std::span<double> dv)
{
	require_dim("cosine gradient length", u.size(), du.size());
	require_dim("cosine gradient length", v.size(), dv.size());
	const double nu = std::sqrt(squared_norm(u));
	const double nv = std::sqrt(squared_norm(v));
	const double s = dot(u, v);
	const double denom = nu * nv + kCosineEpsilon;
	// d/du [s / (|u||v| + eps)] = v / denom - s |v| u / (|u| denom^2)
	const double cu = nu > 0.0 ? -upstream * s * nv / (nu * denom * denom) : 0.0;
	const double cv = nv > 0.0 ? -upstream * s * nu / (nv * denom * denom) : 0.0;
	for (std::size_t i = 0; i < u.size(); ++i) {
		du[i] += upstream * v[i] / denom + cu * u[i];
		dv[i] += upstream * u[i] / denom + cv * v[i];
	}
}

IntentLossResult intent_loss(std::span<const double> event, std::span<const double> intent,
                             std::span<const double> negative)
{
	IntentLossResult r;
	r.positive_cosine = cosine_similarity(event, intent);
	r.negative_cosine = cosine_similarity(event, negative);
	r.loss = std::max(0.0, 1.0 - (r.positive_cosine - r.negative_cosine));
	return r;
}

IntentLossResult intent_loss_backward(std::span<const double> event, std::span<const double> intent,
                                      std::span<const double> negative, double upstream, std::span<double> devent,
                                      std::span<double> dintent, std::span<double> dnegative)
{
	const auto r = intent_loss(event, intent, negative);
	if (r.loss > 0.0) {
		cosine_similarity_backward(event, intent, -upstream, devent, dintent);
		cosine_similarity_backward(event, negative, upstream, devent, dnegative);
	}
	return r;
}

} // namespace evemb
