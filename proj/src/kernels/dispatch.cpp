#include "glueforge/kernels.hpp"

#include <cstdlib>
#include <string>

namespace glueforge::kernels {

bool supported(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
    if (isa == Isa::avx2 && supported(Isa::avx2)) return detail::avx2_table;
#endif
    return detail::scalar_table;
}

Isa active_isa() {
    static const Isa chosen = [] {
        if (const char* env = std::getenv("GLUEFORGE_ISA"); env && std::string(env) == "scalar")
            return Isa::scalar;
        return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
    }();
    return chosen;
}

const KernelTable& active() { return table(active_isa()); }

std::string_view name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace glueforge::kernels
