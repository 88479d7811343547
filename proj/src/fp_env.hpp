#ifndef AOI_FP_ENV_HPP_
#define AOI_FP_ENV_HPP_

#if defined(__SSE2__) || defined(__x86_64__)
#include <xmmintrin.h>
#define AOI_HAVE_MXCSR 1
#endif

namespace aoi::detail {

/// Flushes subnormal results and operands to zero for the lifetime of the
/// guard on the calling thread. Geometric tails of the age-gain recursion
/// decay into subnormals, which are two orders of magnitude slower.
class FlushSubnormals {
public:
#ifdef AOI_HAVE_MXCSR
    FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
    ~FlushSubnormals() { _mm_setcsr(saved_); }
#else
    FlushSubnormals() = default;
#endif
    FlushSubnormals(const FlushSubnormals&) = delete;
    FlushSubnormals& operator=(const FlushSubnormals&) = delete;

    /// True when the hardware mode is active and no manual flushing is needed.
    static constexpr bool hardware()
    {
#ifdef AOI_HAVE_MXCSR
        return true;
#else
        return false;
#endif
    }

private:
#ifdef AOI_HAVE_MXCSR
    unsigned saved_;
#endif
};

}  // namespace aoi::detail

#endif  // AOI_FP_ENV_HPP_
