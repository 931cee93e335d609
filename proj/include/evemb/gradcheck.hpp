#pragma once

// Central-difference gradient checking for anything that can report a scalar
// loss and its analytic gradient with respect to a set of parameter buffers.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace evemb {

struct ParamBinding {
	std::string name;
	std::span<double> value;       // perturbed in place by the checker
	std::span<const double> grad;  // analytic gradient, valid after backward()
};

class DifferentiableOp {
public:
	virtual ~DifferentiableOp() = default;
	virtual double forward() = 0;
	virtual void backward() = 0;
	virtual std::vector<ParamBinding> bindings() = 0;
};

struct GradCheckResult {
	double max_rel_error = 0.0;
	std::string worst_param;
	std::size_t worst_index = 0;
	double worst_analytic = 0.0;
	double worst_numeric = 0.0;
	std::size_t coordinates = 0;
};

// Max over coordinates of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// Throws Error if the forward value is non-finite at any evaluation point.
GradCheckResult grad_check(DifferentiableOp &op, double step = 1e-5);

// Adapter for ad-hoc ops built from lambdas.
class LambdaOp final : public DifferentiableOp {
public:
	LambdaOp(std::function<double()> forward, std::function<void()> backward,
	         std::function<std::vector<ParamBinding>()> bindings)
		: forward_(std::move(forward)), backward_(std::move(backward)), bindings_(std::move(bindings)) {}

	double forward() override { return forward_(); }
	void backward() override { backward_(); }
	std::vector<ParamBinding> bindings() override { return bindings_(); }

private:
	std::function<double()> forward_;
	std::function<void()> backward_;
	std::function<std::vector<ParamBinding>()> bindings_;
};

} // namespace evemb
