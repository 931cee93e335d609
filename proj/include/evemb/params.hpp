#pragma once

#include "evemb/tensor.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace evemb {

struct ParamId {
	std::size_t index = 0;
	bool operator==(const ParamId &) const = default;
};

// A trainable array plus its batch gradient and Adagrad accumulator, all with
// the same shape. Vectors are stored as rows x 1.
struct Parameter {
	std::string name;
	Matrix value;
	Matrix grad;
	Matrix accum;
	bool regularized = false; // member of the L2-penalised set
	bool row_sparse = false;  // gradients touch few rows (embedding table)

	bool operator==(const Parameter &) const = default;
};

class ParameterStore {
public:
	ParamId add(std::string name, std::size_t rows, std::size_t cols, bool regularized = false,
	            bool row_sparse = false);

	Parameter &operator[](ParamId id) { return params_[id.index]; }
	const Parameter &operator[](ParamId id) const { return params_[id.index]; }

	std::size_t size() const noexcept { return params_.size(); }
	std::span<Parameter> all() noexcept { return params_; }
	std::span<const Parameter> all() const noexcept { return params_; }
	std::optional<ParamId> find(const std::string &name) const;

	// Sum of squares over the regularized parameters.
	double regularized_sq_norm() const;
	void zero_grad();
	std::size_t scalar_count() const;

	bool operator==(const ParameterStore &) const = default;

private:
	std::vector<Parameter> params_;
};

// Per-example gradient scratch that mirrors a ParameterStore's layout. Row
// sparse parameters only hold the rows that were touched, in first-touch order.
class GradientBuffer {
public:
	GradientBuffer() = default;
	explicit GradientBuffer(const ParameterStore &store);

	MatrixView dense(ParamId id);
	// Zero-initialised on first access. The span is invalidated by the next
	// row() call on the same sparse parameter.
	std::span<double> row(ParamId id, std::size_t r);

	void clear();
	// store.grad += this, in a fixed order.
	void add_into(ParameterStore &store) const;
	// Dense copy of one parameter's gradient (sparse rows scattered).
	Matrix to_dense(ParamId id) const;

private:
	struct Slot {
		bool sparse = false;
		std::size_t rows = 0;
		std::size_t cols = 0;
		Matrix dense;
		std::vector<std::size_t> touched;
		std::vector<double> row_data;
		std::unordered_map<std::size_t, std::size_t> row_slot;
	};
	std::vector<Slot> slots_;
};

} // namespace evemb
