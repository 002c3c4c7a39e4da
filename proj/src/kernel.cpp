#include "qsdr/kernel.hpp"

#include <stdexcept>

#include "qsdr/errors.hpp"

namespace qsdr {

double kernel_value(double u, const KernelSpec& spec) {
    if (u < 0.0) u = -u;
    if (u > 1.0) return 0.0;
    switch (spec.kind) {
        case KernelKind::uniform:
            return 0.5;
        case KernelKind::epanechnikov:
            return 0.75 * (1.0 - u * u);
    }
    return 0.0;
}

double kernel_weight(double distance, double h, const KernelSpec& spec) {
    if (!(h > 0.0)) throw std::invalid_argument("kernel_weight: h must be positive");
    if (distance > h) return 0.0;
    return kernel_value(distance / h, spec) / h;
}

KernelKind parse_kernel_kind(const std::string& name) {
    if (name == "uniform") return KernelKind::uniform;
    if (name == "epanechnikov") return KernelKind::epanechnikov;
    throw ConfigError("unknown kernel: " + name);
}

std::string kernel_kind_name(KernelKind kind) {
    return kind == KernelKind::uniform ? "uniform" : "epanechnikov";
}

}  // namespace qsdr
