#pragma once

#include "scisumm/analyze.hpp"
#include "scisumm/corpus.hpp"
#include "scisumm/embed.hpp"
#include "scisumm/error.hpp"
#include "scisumm/eval.hpp"
#include "scisumm/parallel.hpp"
#include "scisumm/rank.hpp"
#include "scisumm/stats.hpp"
#include "scisumm/summarize.hpp"
#include "scisumm/textproc.hpp"
