#include "rollmono/monodromy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "rollmono/errors.hpp"

namespace rollmono {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Runs task(i) for i in [0, n) on a small pool; rethrows the first failure.
template <class Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
}

ReturnSample sample_at(const RollingSystem& sys, const Loop& loop, double alpha,
                       const MonodromyConfig& cfg) {
    BodyState start;
    try {
        start = state_on_torus(sys, loop.at(alpha), cfg.branch, cfg.phi0);
    } catch (const NoRoot& e) {
        throw LoopHitsSingularity("alpha = " + std::to_string(alpha) + ": " + e.what());
    } catch (const RootNotBracketed& e) {
        throw LoopHitsSingularity("alpha = " + std::to_string(alpha) + ": " + e.what());
    } catch (const SingularSystem& e) {
        throw LoopHitsSingularity("alpha = " + std::to_string(alpha) + ": " + e.what());
    }
    ReturnSample s = poincare_return(sys, start, cfg.integrator);
    s.alpha = alpha;
    return s;
}

// Shift b.delta_phi by a multiple of 2 pi to be within pi of a.
void unwrap_against(const ReturnSample& a, ReturnSample& b) {
    b.delta_phi -= kTwoPi * std::round((b.delta_phi - a.delta_phi) / kTwoPi);
}

}  // namespace

IntegralPoint Loop::at(double alpha) const {
    const double varying = center.varying + radius * std::sin(alpha);
    const double h = center.h + radius * std::cos(alpha);
    if (fixed_axis == FixedAxis::J1Fixed) return {model, center.fixed, varying, h};
    return {model, varying, center.fixed, h};
}

double Loop::sample_alpha(int i) const { return kTwoPi * (i + 0.5) / n_samples; }

Loop make_loop(Model model, FixedAxis fixed_axis, const LoopCenter& center, double radius,
               int n_samples) {
    if (!(radius > 0.0)) throw ConfigError("loop radius must be positive");
    if (n_samples < 64) throw ConfigError("loops need at least 64 samples");
    return {model, fixed_axis, center, radius, n_samples};
}

Loop thread_loop(const RollingSystem& sys, FixedAxis fixed_axis, double plane_value,
                 Enclose enclose, double radius, int n_samples) {
    const auto upper = thread_in_plane(sys, Pole::Upper, fixed_axis, plane_value);
    const auto lower = thread_in_plane(sys, Pole::Lower, fixed_axis, plane_value);
    switch (enclose) {
        case Enclose::Upper:
            return make_loop(sys.model(), fixed_axis, {upper[0], plane_value, upper[1]}, radius,
                             n_samples);
        case Enclose::Lower:
            return make_loop(sys.model(), fixed_axis, {lower[0], plane_value, lower[1]}, radius,
                             n_samples);
        case Enclose::Both:
            break;
    }
    const double half = 0.5 * std::hypot(upper[0] - lower[0], upper[1] - lower[1]);
    return make_loop(sys.model(), fixed_axis,
                     {0.5 * (upper[0] + lower[0]), plane_value, 0.5 * (upper[1] + lower[1])},
                     half + radius, n_samples);
}

ReturnSample poincare_return(const RollingSystem& sys, const BodyState& state_on_section,
                             const IntegratorConfig& cfg) {
    const FieldFn field = sys.field_fn();
    const double phi_start = initial_phi(state_on_section.gamma);
    const SectionEvent ev = next_section_crossing(field, state_on_section,
                                                  gamma3_rate_section(field), +1, cfg, 0.0,
                                                  phi_start);
    // The quadrature fixes the branch; the fractional part comes from the
    // symmetry angle, which stays accurate for orbits grazing a pole.
    const double quadrature = ev.phi_unwrapped - phi_start;
    const double angle = symmetry_angle(state_on_section, ev.state);
    ReturnSample s;
    s.delta_phi = angle + kTwoPi * std::round((quadrature - angle) / kTwoPi);
    s.return_time = ev.t;
    s.start = state_on_section;
    s.image = ev.state;
    return s;
}

double rotation_increment(const RollingSystem& sys, const BodyState& state_on_section,
                          const IntegratorConfig& cfg) {
    return poincare_return(sys, state_on_section, cfg).delta_phi;
}

MonodromyResult monodromy_index(const RollingSystem& sys, const Loop& loop,
                                const MonodromyConfig& cfg) {
    if (loop.model != sys.model()) throw ConfigError("loop and system models differ");
    const int n = loop.n_samples;
    // The last sample, at alpha_0 + 2 pi, is recomputed rather than copied.
    std::vector<ReturnSample> samples(n + 1);
    parallel_for(n + 1, cfg.threads, [&](std::size_t i) {
        samples[i] = sample_at(sys, loop, loop.sample_alpha(static_cast<int>(i)), cfg);
    });

    // Refine where the wrapped gap is pi/2 or more.
    int budget = cfg.max_refinements;
    for (;;) {
        std::vector<std::size_t> wide;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            ReturnSample next = samples[i + 1];
            unwrap_against(samples[i], next);
            if (std::abs(next.delta_phi - samples[i].delta_phi) >= 0.5 * kPi) wide.push_back(i);
        }
        if (wide.empty()) break;
        if (static_cast<int>(wide.size()) > budget)
            throw WindingAmbiguous("refinement budget exhausted with " +
                                   std::to_string(wide.size()) + " wide gaps");
        budget -= static_cast<int>(wide.size());
        std::vector<ReturnSample> extra(wide.size());
        parallel_for(wide.size(), cfg.threads, [&](std::size_t j) {
            const double mid = 0.5 * (samples[wide[j]].alpha + samples[wide[j] + 1].alpha);
            extra[j] = sample_at(sys, loop, mid, cfg);
        });
        samples.insert(samples.end(), extra.begin(), extra.end());
        std::sort(samples.begin(), samples.end(),
                  [](const ReturnSample& a, const ReturnSample& b) { return a.alpha < b.alpha; });
    }

    for (std::size_t i = 1; i < samples.size(); ++i) unwrap_against(samples[i - 1], samples[i]);

    MonodromyResult result;
    result.loop = loop;
    const double total = samples.back().delta_phi - samples.front().delta_phi;
    result.k = static_cast<int>(std::lround(total / kTwoPi));
    result.closure_defect = std::abs(total - kTwoPi * result.k);
    result.samples = std::move(samples);
    return result;
}

}  // namespace rollmono
