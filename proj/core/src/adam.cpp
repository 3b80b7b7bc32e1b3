#include "nowcast/adam.hpp"

#include <cmath>
#include <vector>

#include "nowcast/errors.hpp"

namespace nowcast {

namespace {

template <typename T>
std::vector<nn::ConvParams<T>*> convs_of(nn::NetParams<T>& p) {
  std::vector<nn::ConvParams<T>*> out;
  p.for_each_conv([&out](const std::string&, nn::ConvParams<T>& c) { out.push_back(&c); });
  return out;
}

template <typename T>
void update(std::vector<T>& p, const std::vector<T>& g, std::vector<T>& m, std::vector<T>& v,
            const AdamState<T>& s, double c1, double c2) {
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double gn = g[n];
    const double mn = s.beta1 * static_cast<double>(m[n]) + (1.0 - s.beta1) * gn;
    const double vn = s.beta2 * static_cast<double>(v[n]) + (1.0 - s.beta2) * gn * gn;
    m[n] = static_cast<T>(mn);
    v[n] = static_cast<T>(vn);
    const double mhat = mn / c1;
    const double vhat = vn / c2;
    p[n] = static_cast<T>(static_cast<double>(p[n]) - s.lr * mhat / (std::sqrt(vhat) + s.eps));
  }
}

}  // namespace

template <typename T>
void adam_step(nn::NetParams<T>& params, const nn::GradStore<T>& grads, AdamState<T>& state) {
  require(nn::congruent(params, grads) && nn::congruent(params, state.m) &&
              nn::congruent(params, state.v),
          ErrorKind::Shape, "adam_step: parameters, gradients and moments are not congruent");
  state.step_count += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));

  auto ps = convs_of(params);
  auto gs = convs_of(const_cast<nn::GradStore<T>&>(grads));
  auto ms = convs_of(state.m);
  auto vs = convs_of(state.v);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    update(ps[k]->kernels, gs[k]->kernels, ms[k]->kernels, vs[k]->kernels, state, c1, c2);
    update(ps[k]->bias, gs[k]->bias, ms[k]->bias, vs[k]->bias, state, c1, c2);
  }
}

template void adam_step(nn::NetParams<float>&, const nn::GradStore<float>&, AdamState<float>&);
template void adam_step(nn::NetParams<double>&, const nn::GradStore<double>&, AdamState<double>&);

}  // namespace nowcast
