#pragma once

namespace memfuse {

using Volts = double;
using Ohms = double;
using Amperes = double;

}  // namespace memfuse
