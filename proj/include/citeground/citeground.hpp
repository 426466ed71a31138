#pragma once

#include "citeground/abbreviations.hpp"
#include "citeground/config.hpp"
#include "citeground/dataset.hpp"
#include "citeground/diagnostics.hpp"
#include "citeground/error.hpp"
#include "citeground/evalharness.hpp"
#include "citeground/gateway.hpp"
#include "citeground/http_transport.hpp"
#include "citeground/language.hpp"
#include "citeground/longdoc.hpp"
#include "citeground/md5.hpp"
#include "citeground/mock.hpp"
#include "citeground/pipeline.hpp"
#include "citeground/plan.hpp"
#include "citeground/preprocess.hpp"
#include "citeground/prompts.hpp"
#include "citeground/quality.hpp"
#include "citeground/record.hpp"
#include "citeground/render.hpp"
#include "citeground/responses.hpp"
#include "citeground/rng.hpp"
#include "citeground/tag.hpp"
#include "citeground/templates.hpp"
#include "citeground/tokens.hpp"
#include "citeground/verify.hpp"
