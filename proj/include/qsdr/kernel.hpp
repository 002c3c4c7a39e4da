#pragma once

#include <string>

namespace qsdr {

enum class KernelKind { uniform, epanechnikov };

// Univariate kernel evaluated on a scalar distance (the sup norm of the
// scaled displacement). Finite support: zero beyond 1.
struct KernelSpec {
    KernelKind kind = KernelKind::epanechnikov;
};

// K(u): uniform = 0.5 on [0,1]; Epanechnikov = 0.75 (1 - u^2) on [0,1].
double kernel_value(double u, const KernelSpec& spec);

// K_h(distance) = K(distance / h) / h; zero when distance > h.
double kernel_weight(double distance, double h, const KernelSpec& spec);

KernelKind parse_kernel_kind(const std::string& name);
std::string kernel_kind_name(KernelKind kind);

}  // namespace qsdr
