#pragma once

#include "fakecti/attribution.hpp"
#include "fakecti/classifier_client.hpp"
#include "fakecti/corpus.hpp"
#include "fakecti/embedding.hpp"
#include "fakecti/error.hpp"
#include "fakecti/evaluation.hpp"
#include "fakecti/extraction.hpp"
#include "fakecti/fileio.hpp"
#include "fakecti/graph.hpp"
#include "fakecti/prompt.hpp"
#include "fakecti/report.hpp"
#include "fakecti/rng.hpp"
#include "fakecti/scoring.hpp"
#include "fakecti/tuples.hpp"
#include "fakecti/vectorize.hpp"
