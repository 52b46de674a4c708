#pragma once

#include <gsl/gsl_errno.h>

namespace fput {

/// GSL's default error handler aborts; turn it off once and rely on return
/// codes at every call site.
inline void ensure_gsl_quiet() {
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

}  // namespace fput
