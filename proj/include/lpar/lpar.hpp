#pragma once

#include "lpar/combinators.hpp"
#include "lpar/goal.hpp"
#include "lpar/jugs.hpp"
#include "lpar/mailbox.hpp"
#include "lpar/pipeline.hpp"
#include "lpar/runtime.hpp"
#include "lpar/term.hpp"
#include "lpar/workloads.hpp"
