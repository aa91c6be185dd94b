#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nussim::agents {

/// Optional storage-function certificate (V, W) for the passivity-like
/// inequality dV/dt <= -W(x) + b*u*y. Used only by tests and diagnostic
/// checks; the protocols never read it.
struct StorageCertificate {
    std::function<double(std::span<const double>)> storage;      // V(x) >= 0
    std::function<double(std::span<const double>)> dissipation;  // W(x) >= 0
};

/// A SISO nonlinear plant dx = f(x, u), y = h(x) with input gain b of
/// unknown sign. The gain is plant data: the simulator applies it inside
/// drift, and it is never handed to the controller.
struct AgentModel {
    std::string id;
    std::size_t state_dim = 0;
    double gain_b = 0.0;
    std::function<void(std::span<const double> x, double u, std::span<double> dx)> drift;
    std::function<double(std::span<const double> x)> output;
    std::optional<StorageCertificate> certificate;
};

/// Constant reference node: dx0 = 0, y0 = x0.
struct LeaderModel {
    double x0 = 0.0;
    double output() const { return x0; }
};

/// dx = b*u, y = x. V = x^2/2, W = 0.
AgentModel make_single_integrator(double b);

/// dx1 = x2, dx2 = -x1 + b*u, y = x2. V = (x1^2 + x2^2)/2, W = 0.
AgentModel make_harmonic_oscillator(double b);

/// dx1 = x2, dx2 = -x2 + b*u, y = x2. V = x2^2/2, W = x2^2.
AgentModel make_damped_integrator_chain(double b);

/// dx1 = x2, dx2 = -x1 - x2 + b*u, y = x2. V = (x1^2 + x2^2)/2, W = x2^2.
AgentModel make_damped_oscillator(double b);

/// Controlled Lorenz system:
/// dx1 = x2 - x1, dx2 = x1 - x2 - x1*x3 + b*u, dx3 = x1*x2 - x3, y = x2.
/// V = (x1^2 + x2^2 + x3^2)/2, W = (x1 - x2)^2 + x3^2.
AgentModel make_lorenz_follower(double b);

/// One row of the model catalog.
struct ModelInfo {
    std::string_view id;
    std::size_t state_dim;
    std::string_view output;
    std::string_view dynamics;
    bool has_certificate;
};

/// Catalog of every model id accepted in scenario files (including "leader").
std::span<const ModelInfo> model_catalog();

/// Construct a follower model by catalog id; throws on unknown id or b = 0.
AgentModel make_model(std::string_view id, double b);

struct CertificateSample {
    std::vector<double> x;
    double u = 0.0;
};

/// Outcome of the finite-difference certificate check. When a sample fails,
/// carries the first violation: lhs is the finite-difference dV/dt, rhs the
/// certified bound -W + b*u*y, slack the tolerance that was allowed.
struct CertificateReport {
    bool ok = true;
    std::size_t sample_index = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
};

/// Checks dV/dt <= -W(x) + b*u*y at each sample, with dV/dt evaluated as a
/// central finite difference of V (step 1e-6) dotted with f(x, u); allows
/// slack 1e-6 * (1 + |V(x)|). Requires a certificate.
CertificateReport check_passivity_certificate(const AgentModel& m,
                                              std::span<const CertificateSample> samples);

}  // namespace nussim::agents
