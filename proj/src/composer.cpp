#include "evemb/composer.hpp"

#include <algorithm>
#include <cmath>

namespace evemb {

CompositionLayer CompositionLayer::create(ParameterStore &store, const std::string &prefix, std::size_t d_in,
                                          std::size_t k, std::size_t n)
{
	if (n < 1 || n > d_in)
		throw DimensionError(prefix + " rank: expected 1 <= n <= " + std::to_string(d_in) + ", got " +
		                     std::to_string(n));
	if (k < 1)
		throw DimensionError(prefix + " slice count must be positive");
	CompositionLayer layer;
	layer.d_in = d_in;
	layer.k = k;
	layer.n = n;
	layer.left = store.add(prefix + ".left", k, d_in * n, true);
	layer.right = store.add(prefix + ".right", k, n * d_in, true);
	layer.diag = store.add(prefix + ".diag", k, d_in, true);
	layer.weight = store.add(prefix + ".W", k, 2 * d_in, true);
	layer.bias = store.add(prefix + ".b", k, 1, true);
	return layer;
}

LowRankSliceView CompositionLayer::slice(const ParameterStore &store, std::size_t i) const
{
	return {
		{store[left].value.row(i), d_in, n},
		{store[right].value.row(i), n, d_in},
		store[diag].value.row(i),
	};
}

LowRankSliceGradView CompositionLayer::slice_grad(GradientBuffer &grads, std::size_t i) const
{
	return {
		{grads.dense(left).row(i), d_in, n},
		{grads.dense(right).row(i), n, d_in},
		grads.dense(diag).row(i),
	};
}

void CompositionLayer::initialize(ParameterStore &store, Rng &rng) const
{
	const double r = 1.0 / std::sqrt(static_cast<double>(d_in));
	rng.fill_uniform(store[left].value.span(), -r, r);
	rng.fill_uniform(store[right].value.span(), -r, r);
	fill_zero(store[diag].value.span());
	rng.fill_uniform(store[weight].value.span(), -r, r);
	rng.fill_uniform(store[bias].value.span(), -r, r);
}

Vector compose_pair(const ParameterStore &store, const CompositionLayer &layer, std::span<const double> x,
                    std::span<const double> y, ComposeCache *cache)
{
	require_dim("compose_pair left input length (d_in)", layer.d_in, x.size());
	require_dim("compose_pair right input length (d_in)", layer.d_in, y.size());

	ComposeCache local;
	ComposeCache &c = cache ? *cache : local;
	c.input = Vector(2 * layer.d_in);
	std::copy(x.begin(), x.end(), c.input.begin());
	std::copy(y.begin(), y.end(), c.input.begin() + static_cast<std::ptrdiff_t>(layer.d_in));
	c.left_x.assign(layer.k * layer.n, 0.0);
	c.right_y.assign(layer.k * layer.n, 0.0);

	Vector bilinear(layer.k);
	for (std::size_t i = 0; i < layer.k; ++i)
		bilinear[i] = bilinear_lowrank(x, y, layer.slice(store, i),
		                               std::span<double>(c.left_x).subspan(i * layer.n, layer.n),
		                               std::span<double>(c.right_y).subspan(i * layer.n, layer.n));
	c.out = affine_tanh(c.input, store[layer.weight].value, store[layer.bias].value.span(), bilinear);
	return c.out;
}

void compose_pair_backward(const ParameterStore &store, const CompositionLayer &layer, const ComposeCache &cache,
                           std::span<const double> dout, GradientBuffer &grads, std::span<double> dx,
                           std::span<double> dy)
{
	require_dim("compose_pair upstream length (k)", layer.k, dout.size());
	require_dim("compose_pair dx length (d_in)", layer.d_in, dx.size());
	require_dim("compose_pair dy length (d_in)", layer.d_in, dy.size());

	const auto x = cache.input.span().first(layer.d_in);
	const auto y = cache.input.span().subspan(layer.d_in);
	Vector dz(layer.k);
	Vector dinput(2 * layer.d_in);
	auto db = grads.dense(layer.bias);
	affine_tanh_backward(cache.input, store[layer.weight].value, cache.out, dout, dz, grads.dense(layer.weight),
	                     db.data, dinput);
	for (std::size_t i = 0; i < layer.k; ++i)
		bilinear_lowrank_backward(x, y, layer.slice(store, i),
		                          std::span<const double>(cache.left_x).subspan(i * layer.n, layer.n),
		                          std::span<const double>(cache.right_y).subspan(i * layer.n, layer.n), dz[i],
		                          layer.slice_grad(grads, i), dx, dy);
	axpy(1.0, dinput.span().first(layer.d_in), dx);
	axpy(1.0, dinput.span().subspan(layer.d_in), dy);
}

IndexedEvent index_event(const EventTuple &event, const Vocabulary &vocab)
{
	return {vocab.lookup(event.actor), vocab.lookup(event.predicate), vocab.lookup(event.object)};
}

EventComposer EventComposer::create(ParameterStore &store, std::size_t d, std::size_t k, std::size_t n)
{
	EventComposer c;
	c.actor_predicate = CompositionLayer::create(store, "composer.actor_predicate", d, k, n);
	c.predicate_object = CompositionLayer::create(store, "composer.predicate_object", d, k, n);
	c.combine = CompositionLayer::create(store, "composer.combine", k, k, n);
	c.score = store.add("composer.U", k, 1);
	return c;
}

EventForward embed_event_forward(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                                 const IndexedEvent &event)
{
	const ConstMatrixView table = store[embedding].value;
	EventForward f;
	f.actor = average_rows(table, event.actor);
	f.predicate = average_rows(table, event.predicate);
	f.object = average_rows(table, event.object);
	compose_pair(store, composer.actor_predicate, f.actor, f.predicate, &f.s1);
	compose_pair(store, composer.predicate_object, f.predicate, f.object, &f.s2);
	compose_pair(store, composer.combine, f.s1.out, f.s2.out, &f.c);
	return f;
}

Vector embed_event(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                   const IndexedEvent &event)
{
	return embed_event_forward(store, composer, embedding, event).c.out;
}

double score_embedding(const ParameterStore &store, const EventComposer &composer, std::span<const double> c)
{
	return dot(store[composer.score].value.span(), c);
}

double score_event(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                   const IndexedEvent &event)
{
	return score_embedding(store, composer, embed_event(store, composer, embedding, event));
}

namespace {

void scatter_mean(GradientBuffer &grads, ParamId embedding, std::span<const WordId> words, std::span<const double> d)
{
	const double inv = 1.0 / static_cast<double>(words.size());
	for (WordId w : words)
		axpy(inv, d, grads.row(embedding, w));
}

} // namespace

void embed_event_backward(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                          const IndexedEvent &event, const EventForward &fwd, std::span<const double> dc,
                          GradientBuffer &grads)
{
	const std::size_t k = composer.width();
	const std::size_t d = composer.actor_predicate.d_in;
	Vector ds1(k), ds2(k);
	compose_pair_backward(store, composer.combine, fwd.c, dc, grads, ds1, ds2);
	Vector da(d), dp(d), dobj(d);
	compose_pair_backward(store, composer.actor_predicate, fwd.s1, ds1, grads, da, dp);
	compose_pair_backward(store, composer.predicate_object, fwd.s2, ds2, grads, dp, dobj);
	scatter_mean(grads, embedding, event.actor, da);
	scatter_mean(grads, embedding, event.predicate, dp);
	scatter_mean(grads, embedding, event.object, dobj);
}

IndexedEvent corrupt_event(const IndexedEvent &event, std::size_t vocab_size, CorruptionTarget target, Rng &rng)
{
	if (vocab_size < 3)
		throw Error("corruption needs at least 2 known words in the vocabulary, have " +
		            std::to_string(vocab_size == 0 ? 0 : vocab_size - 1));
	IndexedEvent out = event;
	auto &words = target == CorruptionTarget::actor ? out.actor : out.object;
	for (auto &w : words) {
		const WordId original = w;
		do {
			w = static_cast<WordId>(1 + rng.uniform_index(vocab_size - 1));
		} while (w == original);
	}
	return out;
}

EventTuple corrupt_event(const EventTuple &event, const Vocabulary &vocab, CorruptionTarget target, Rng &rng)
{
	const auto corrupted = corrupt_event(index_event(event, vocab), vocab.size(), target, rng);
	EventTuple out = event;
	auto &words = target == CorruptionTarget::actor ? out.actor : out.object;
	const auto &ids = target == CorruptionTarget::actor ? corrupted.actor : corrupted.object;
	for (std::size_t i = 0; i < words.size(); ++i)
		words[i] = vocab.word(ids[i]);
	return out;
}

double margin_hinge(double positive_score, double negative_score) noexcept
{
	return std::max(0.0, 1.0 - positive_score + negative_score);
}

double l2_penalty(const ParameterStore &store, double lambda)
{
	return lambda * store.regularized_sq_norm();
}

void l2_penalty_backward(const ParameterStore &store, double lambda, double upstream, GradientBuffer &grads)
{
	const double scale = 2.0 * lambda * upstream;
	if (scale == 0.0)
		return;
	for (std::size_t i = 0; i < store.size(); ++i) {
		const auto &p = store[ParamId{i}];
		if (p.regularized)
			axpy(scale, p.value.span(), grads.dense(ParamId{i}).data);
	}
}

MarginLossResult event_margin_loss(const ParameterStore &store, const EventComposer &composer, ParamId embedding,
                                   const IndexedEvent &event, const IndexedEvent &corrupted, double lambda,
                                   GradientBuffer *grads, double upstream)
{
	const auto pos = embed_event_forward(store, composer, embedding, event);
	const auto neg = embed_event_forward(store, composer, embedding, corrupted);
	MarginLossResult r;
	r.positive_score = score_embedding(store, composer, pos.embedding());
	r.negative_score = score_embedding(store, composer, neg.embedding());
	r.hinge = margin_hinge(r.positive_score, r.negative_score);
	r.penalty = l2_penalty(store, lambda);
	r.loss = margin_loss_total(r.hinge, r.penalty);
	if (!grads)
		return r;

	// Same accumulation order as joint_loss: corrupted event, penalty, then
	// the observed event, so the two agree bit for bit.
	const auto u = store[composer.score].value.span();
	Vector dpos(u.size());
	if (r.hinge > 0.0) {
		Vector dneg(u.size());
		axpy(-upstream, u, dpos);
		axpy(upstream, u, dneg);
		auto du = grads->dense(composer.score).data;
		axpy(-upstream, pos.embedding(), du);
		axpy(upstream, neg.embedding(), du);
		embed_event_backward(store, composer, embedding, corrupted, neg, dneg, *grads);
	}
	l2_penalty_backward(store, lambda, upstream, *grads);
	if (r.hinge > 0.0)
		embed_event_backward(store, composer, embedding, event, pos, dpos, *grads);
	return r;
}

} // namespace evemb
