#include "evemb/gradcheck.hpp"

#include "evemb/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace evemb {

namespace {

double checked_forward(DifferentiableOp &op)
{
	const double v = op.forward();
	if (!std::isfinite(v))
		throw Error("grad_check: forward value is not finite");
	return v;
}

} // namespace

GradCheckResult grad_check(DifferentiableOp &op, double step)
{
	checked_forward(op);
	op.backward();
	auto bindings = op.bindings();

	// The analytic gradient buffers may be rewritten by later forward calls, so
	// take a copy first.
	std::vector<std::vector<double>> analytic;
	analytic.reserve(bindings.size());
	for (const auto &b : bindings) {
		require_dim(("gradient buffer for " + b.name).c_str(), b.value.size(), b.grad.size());
		analytic.emplace_back(b.grad.begin(), b.grad.end());
	}

	GradCheckResult result;
	for (std::size_t p = 0; p < bindings.size(); ++p) {
		auto values = bindings[p].value;
		for (std::size_t i = 0; i < values.size(); ++i) {
			const double saved = values[i];
			values[i] = saved + step;
			const double plus = checked_forward(op);
			values[i] = saved - step;
			const double minus = checked_forward(op);
			values[i] = saved;

			const double numeric = (plus - minus) / (2.0 * step);
			const double a = analytic[p][i];
			const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
			const double err = std::abs(a - numeric) / denom;
			++result.coordinates;
			if (err > result.max_rel_error || result.coordinates == 1) {
				result.max_rel_error = err;
				result.worst_param = bindings[p].name;
				result.worst_index = i;
				result.worst_analytic = a;
				result.worst_numeric = numeric;
			}
		}
	}
	return result;
}

} // namespace evemb
