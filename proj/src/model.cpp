#include "flexq/model.hpp"

#include "flexq/errors.hpp"

namespace flexq {

namespace {

const ModelParams& checked(const ModelParams& p) {
    p.validate();
    return p;
}

}  // namespace

Model::Model(ModelParams params) : params_(checked(params)), space_(params_.n, params_.B) {
    if (params_.B > 126) throw UnsupportedConfiguration("B above 126 is not supported");
    if (params_.n > 31) throw UnsupportedConfiguration("n above 31 is not supported");
    const auto N = static_cast<std::size_t>(space_.cardinality());
    const auto n = static_cast<std::size_t>(params_.n);
    levels_.resize(N * n);
    holding_.resize(N);
    delta_.resize(N);
    service_.resize(N);
    for (std::size_t s = 0; s < N; ++s) {
        const SystemState q = space_.decode(static_cast<StateIndex>(s));
        double service = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            levels_[s * n + i] = static_cast<std::int8_t>(q[i]);
            service += effective_rate(q, static_cast<int>(i), params_);
        }
        holding_[s] = holding_rate(q, params_);
        service_[s] = service;
        delta_[s] = 1.0 / (service + params_.lambda + params_.gamma);
    }
}

double Model::contraction_modulus() const {
    const double rate = params_.lambda + params_.total_mu();
    return rate / (rate + params_.gamma);
}

}  // namespace flexq
