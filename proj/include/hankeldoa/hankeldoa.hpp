// Convenience header pulling in the whole library.
#pragma once

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/completion.hpp"
#include "hankeldoa/doa.hpp"
#include "hankeldoa/errors.hpp"
#include "hankeldoa/hankel.hpp"
#include "hankeldoa/harness.hpp"
#include "hankeldoa/io.hpp"
#include "hankeldoa/leverage.hpp"
#include "hankeldoa/svg.hpp"
