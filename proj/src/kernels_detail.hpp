#pragma once

#include "looplink/kernels.hpp"

// Backend tables provided by the ISA-specific translation units.
namespace looplink::kernels::detail {

const Table& scalar_table();

#if LOOPLINK_HAVE_AVX2_TU
const Table& avx2_table();
#endif

#if LOOPLINK_HAVE_NEON_TU
const Table& neon_table();
#endif

}  // namespace looplink::kernels::detail
