#include "nussim/agents.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace nussim::agents {

namespace {

constexpr double kFdStep = 1e-6;

void require_nonzero_gain(double b) {
    if (b == 0.0 || !std::isfinite(b))
        throw std::invalid_argument("control gain must be nonzero");
}

double sum_of_squares(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

constexpr std::array<ModelInfo, 6> kCatalog = {{
    {"single_integrator", 1, "x1", "dx1 = b*u", true},
    {"harmonic_oscillator", 2, "x2", "dx1 = x2; dx2 = -x1 + b*u", true},
    {"damped_integrator_chain", 2, "x2", "dx1 = x2; dx2 = -x2 + b*u", true},
    {"damped_oscillator", 2, "x2", "dx1 = x2; dx2 = -x1 - x2 + b*u", true},
    {"lorenz", 3, "x2", "dx1 = x2 - x1; dx2 = x1 - x2 - x1*x3 + b*u; dx3 = x1*x2 - x3", true},
    {"leader", 1, "x0", "dx0 = 0 (constant reference)", false},
}};

}  // namespace

AgentModel make_single_integrator(double b) {
    require_nonzero_gain(b);
    AgentModel m;
    m.id = "single_integrator";
    m.state_dim = 1;
    m.gain_b = b;
    m.drift = [b](std::span<const double> x, double u, std::span<double> dx) {
        (void)x;
        dx[0] = b * u;
    };
    m.output = [](std::span<const double> x) { return x[0]; };
    m.certificate = StorageCertificate{
        [](std::span<const double> x) { return 0.5 * x[0] * x[0]; },
        [](std::span<const double>) { return 0.0; },
    };
    return m;
}

AgentModel make_harmonic_oscillator(double b) {
    require_nonzero_gain(b);
    AgentModel m;
    m.id = "harmonic_oscillator";
    m.state_dim = 2;
    m.gain_b = b;
    m.drift = [b](std::span<const double> x, double u, std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = -x[0] + b * u;
    };
    m.output = [](std::span<const double> x) { return x[1]; };
    m.certificate = StorageCertificate{
        [](std::span<const double> x) { return 0.5 * sum_of_squares(x); },
        [](std::span<const double>) { return 0.0; },
    };
    return m;
}

AgentModel make_damped_integrator_chain(double b) {
    require_nonzero_gain(b);
    AgentModel m;
    m.id = "damped_integrator_chain";
    m.state_dim = 2;
    m.gain_b = b;
    m.drift = [b](std::span<const double> x, double u, std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = -x[1] + b * u;
    };
    m.output = [](std::span<const double> x) { return x[1]; };
    m.certificate = StorageCertificate{
        [](std::span<const double> x) { return 0.5 * x[1] * x[1]; },
        [](std::span<const double> x) { return x[1] * x[1]; },
    };
    return m;
}

AgentModel make_damped_oscillator(double b) {
    require_nonzero_gain(b);
    AgentModel m;
    m.id = "damped_oscillator";
    m.state_dim = 2;
    m.gain_b = b;
    m.drift = [b](std::span<const double> x, double u, std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = -x[0] - x[1] + b * u;
    };
    m.output = [](std::span<const double> x) { return x[1]; };
    m.certificate = StorageCertificate{
        [](std::span<const double> x) { return 0.5 * sum_of_squares(x); },
        [](std::span<const double> x) { return x[1] * x[1]; },
    };
    return m;
}

AgentModel make_lorenz_follower(double b) {
    require_nonzero_gain(b);
    AgentModel m;
    m.id = "lorenz";
    m.state_dim = 3;
    m.gain_b = b;
    m.drift = [b](std::span<const double> x, double u, std::span<double> dx) {
        dx[0] = x[1] - x[0];
        dx[1] = x[0] - x[1] - x[0] * x[2] + b * u;
        dx[2] = x[0] * x[1] - x[2];
    };
    m.output = [](std::span<const double> x) { return x[1]; };
    m.certificate = StorageCertificate{
        [](std::span<const double> x) { return 0.5 * sum_of_squares(x); },
        [](std::span<const double> x) {
            const double d = x[0] - x[1];
            return d * d + x[2] * x[2];
        },
    };
    return m;
}

std::span<const ModelInfo> model_catalog() { return kCatalog; }

AgentModel make_model(std::string_view id, double b) {
    if (id == "single_integrator") return make_single_integrator(b);
    if (id == "harmonic_oscillator") return make_harmonic_oscillator(b);
    if (id == "damped_integrator_chain") return make_damped_integrator_chain(b);
    if (id == "damped_oscillator") return make_damped_oscillator(b);
    if (id == "lorenz") return make_lorenz_follower(b);
    throw std::invalid_argument("unknown model id: " + std::string(id));
}

CertificateReport check_passivity_certificate(const AgentModel& m,
                                              std::span<const CertificateSample> samples) {
    if (!m.certificate) throw std::invalid_argument("model carries no certificate");
    const auto& v = m.certificate->storage;
    const auto& w = m.certificate->dissipation;

    std::vector<double> f(m.state_dim);
    std::vector<double> xp(m.state_dim);
    std::vector<double> xm(m.state_dim);

    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& sample = samples[s];
        if (sample.x.size() != m.state_dim)
            throw std::invalid_argument("certificate sample has wrong state dimension");

        m.drift(sample.x, sample.u, f);

        // dV/dt = grad V . f via central differences of V.
        double vdot = 0.0;
        for (std::size_t d = 0; d < m.state_dim; ++d) {
            xp.assign(sample.x.begin(), sample.x.end());
            xm.assign(sample.x.begin(), sample.x.end());
            xp[d] += kFdStep;
            xm[d] -= kFdStep;
            vdot += (v(xp) - v(xm)) / (2.0 * kFdStep) * f[d];
        }

        const double y = m.output(sample.x);
        const double bound = -w(sample.x) + m.gain_b * sample.u * y;
        const double slack = 1e-6 * (1.0 + std::abs(v(sample.x)));
        if (vdot > bound + slack) {
            return {false, s, vdot, bound, slack};
        }
    }
    return {};
}

}  // namespace nussim::agents
