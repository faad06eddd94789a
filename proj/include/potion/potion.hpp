#pragma once

#include "potion/category.hpp"
#include "potion/corpus.hpp"
#include "potion/error.hpp"
#include "potion/featurizer.hpp"
#include "potion/format.hpp"
#include "potion/generator.hpp"
#include "potion/lexicon.hpp"
#include "potion/model.hpp"
#include "potion/model_io.hpp"
#include "potion/pipeline.hpp"
#include "potion/report.hpp"
#include "potion/rng.hpp"
#include "potion/text.hpp"
#include "potion/tokenizer.hpp"
