#include "beamflutter/parallel.hpp"

namespace beamflutter {

int available_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace beamflutter
