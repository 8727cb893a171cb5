#ifndef TOURMLM_TOURMLM_HPP
#define TOURMLM_TOURMLM_HPP

#include "tourmlm/checkpoint.hpp"
#include "tourmlm/corpus.hpp"
#include "tourmlm/error.hpp"
#include "tourmlm/eval.hpp"
#include "tourmlm/ingest.hpp"
#include "tourmlm/model.hpp"
#include "tourmlm/recommender.hpp"
#include "tourmlm/sentiment.hpp"
#include "tourmlm/stats.hpp"
#include "tourmlm/synth.hpp"
#include "tourmlm/types.hpp"

#endif
