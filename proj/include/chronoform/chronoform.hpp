#pragma once

#include "chronoform/climax.hpp"
#include "chronoform/error.hpp"
#include "chronoform/form_grammar.hpp"
#include "chronoform/midi.hpp"
#include "chronoform/rational.hpp"
#include "chronoform/recurrence.hpp"
#include "chronoform/report.hpp"
#include "chronoform/score.hpp"
#include "chronoform/skyline.hpp"
#include "chronoform/text_format.hpp"
