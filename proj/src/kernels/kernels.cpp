#include "cmfd/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "cmfd/log.hpp"

namespace cmfd::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops_table(); // kernels_avx2.cpp
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* avx2_ops_if_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return &avx2_ops_table();
#endif
    return nullptr;
}

namespace {

struct Selection {
    const Ops* table;
    const char* name;
};

Selection select() {
    const char* req = std::getenv("CMFD_KERNELS");
    if (req && std::strcmp(req, "scalar") == 0) return {&scalar_ops(), "scalar"};
    if (req && std::strcmp(req, "avx2") == 0) {
        if (const Ops* t = avx2_ops_if_supported()) return {t, "avx2"};
        log::warn("CMFD_KERNELS=avx2 requested but unsupported; using scalar kernels");
        return {&scalar_ops(), "scalar"};
    }
    if (req && std::strcmp(req, "auto") != 0 && *req != '\0')
        log::warn("unknown CMFD_KERNELS value '", req, "'; using auto selection");
    if (const Ops* t = avx2_ops_if_supported()) return {t, "avx2"};
    return {&scalar_ops(), "scalar"};
}

const Selection& selection() {
    static const Selection s = select();
    return s;
}

} // namespace

const Ops& ops() { return *selection().table; }

std::string_view active_backend() { return selection().name; }

} // namespace cmfd::kernels
