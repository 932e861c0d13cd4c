#pragma once

#include "kronlearn/kernels.hpp"

namespace kronlearn::kernels {

#if defined(__x86_64__) || defined(__i386__)
const Kernels& detail_avx2();
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
const Kernels& detail_neon();
#endif

}  // namespace kronlearn::kernels
