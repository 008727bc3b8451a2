#pragma once

#include "clear/align.hpp"
#include "clear/argcomp.hpp"
#include "clear/bias.hpp"
#include "clear/corpus.hpp"
#include "clear/error.hpp"
#include "clear/judge.hpp"
#include "clear/lexical.hpp"
#include "clear/report.hpp"
#include "clear/semantic.hpp"
#include "clear/syntactic.hpp"
#include "clear/textproc.hpp"
#include "clear/unicode.hpp"
