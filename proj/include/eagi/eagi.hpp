#pragma once

#include "eagi/agents.hpp"
#include "eagi/answer_spec.hpp"
#include "eagi/codec.hpp"
#include "eagi/design_space.hpp"
#include "eagi/errors.hpp"
#include "eagi/extract.hpp"
#include "eagi/harness.hpp"
#include "eagi/instance_io.hpp"
#include "eagi/json_util.hpp"
#include "eagi/oracle.hpp"
#include "eagi/propellers.hpp"
#include "eagi/question_bank.hpp"
#include "eagi/sampling.hpp"
#include "eagi/scoring.hpp"
#include "eagi/taxonomy.hpp"
#include "eagi/units.hpp"
