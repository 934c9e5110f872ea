#pragma once

#include "sparsedm/aggregate.hpp"
#include "sparsedm/classic.hpp"
#include "sparsedm/core.hpp"
#include "sparsedm/eval.hpp"
#include "sparsedm/index.hpp"
#include "sparsedm/ingest.hpp"
#include "sparsedm/parallel.hpp"
#include "sparsedm/sdm.hpp"
#include "sparsedm/segmenter.hpp"
#include "sparsedm/sweep.hpp"
#include "sparsedm/synthetic.hpp"
#include "sparsedm/tune.hpp"
