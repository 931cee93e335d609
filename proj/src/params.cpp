#include "evemb/params.hpp"

namespace evemb {

ParamId ParameterStore::add(std::string name, std::size_t rows, std::size_t cols, bool regularized, bool row_sparse)
{
	if (find(name))
		throw Error("duplicate parameter name: " + name);
	Parameter p;
	p.name = std::move(name);
	p.value = Matrix(rows, cols);
	p.grad = Matrix(rows, cols);
	p.accum = Matrix(rows, cols);
	p.regularized = regularized;
	p.row_sparse = row_sparse;
	params_.push_back(std::move(p));
	return ParamId{params_.size() - 1};
}

std::optional<ParamId> ParameterStore::find(const std::string &name) const
{
	for (std::size_t i = 0; i < params_.size(); ++i)
		if (params_[i].name == name)
			return ParamId{i};
	return std::nullopt;
}

double ParameterStore::regularized_sq_norm() const
{
	double s = 0.0;
	for (const auto &p : params_)
		if (p.regularized)
			s += squared_norm(p.value.span());
	return s;
}

void ParameterStore::zero_grad()
{
	for (auto &p : params_)
		fill_zero(p.grad.span());
}

std::size_t ParameterStore::scalar_count() const
{
	std::size_t n = 0;
	for (const auto &p : params_)
		n += p.value.size();
	return n;
}

GradientBuffer::GradientBuffer(const ParameterStore &store)
{
	slots_.reserve(store.size());
	for (const auto &p : store.all()) {
		Slot s;
		s.sparse = p.row_sparse;
		s.rows = p.value.rows();
		s.cols = p.value.cols();
		if (!s.sparse)
			s.dense = Matrix(s.rows, s.cols);
		slots_.push_back(std::move(s));
	}
}

MatrixView GradientBuffer::dense(ParamId id)
{
	auto &s = slots_.at(id.index);
	if (s.sparse)
		throw Error("dense gradient view requested for a row-sparse parameter");
	return s.dense.view();
}

std::span<double> GradientBuffer::row(ParamId id, std::size_t r)
{
	auto &s = slots_.at(id.index);
	if (r >= s.rows)
		throw DimensionError("gradient row " + std::to_string(r) + " out of range " + std::to_string(s.rows));
	if (!s.sparse)
		return s.dense.row(r);
	auto [it, inserted] = s.row_slot.try_emplace(r, s.touched.size());
	if (inserted) {
		s.touched.push_back(r);
		s.row_data.resize(s.row_data.size() + s.cols, 0.0);
	}
	return std::span<double>(s.row_data).subspan(it->second * s.cols, s.cols);
}

void GradientBuffer::clear()
{
	for (auto &s : slots_) {
		if (s.sparse) {
			s.touched.clear();
			s.row_data.clear();
			s.row_slot.clear();
		} else {
			fill_zero(s.dense.span());
		}
	}
}

void GradientBuffer::add_into(ParameterStore &store) const
{
	require_dim("gradient buffer parameter count", store.size(), slots_.size());
	for (std::size_t i = 0; i < slots_.size(); ++i) {
		const auto &s = slots_[i];
		auto &g = store[ParamId{i}].grad;
		if (!s.sparse) {
			axpy(1.0, s.dense.span(), g.span());
			continue;
		}
		for (std::size_t t = 0; t < s.touched.size(); ++t)
			axpy(1.0, std::span<const double>(s.row_data).subspan(t * s.cols, s.cols), g.row(s.touched[t]));
	}
}

Matrix GradientBuffer::to_dense(ParamId id) const
{
	const auto &s = slots_.at(id.index);
	if (!s.sparse)
		return s.dense;
	Matrix m(s.rows, s.cols);
	for (std::size_t t = 0; t < s.touched.size(); ++t)
		axpy(1.0, std::span<const double>(s.row_data).subspan(t * s.cols, s.cols), m.row(s.touched[t]));
	return m;
}

} // namespace evemb
