#pragma once

namespace fivebar {

// Serial is the reference path; parallel spreads independent work items over
// OpenMP threads and must produce identical results.
enum class Execution { serial, parallel };

}  // namespace fivebar
