#pragma once

#include "emotutor/emotion.hpp"
#include "emotutor/errors.hpp"
#include "emotutor/eval/benchmark.hpp"
#include "emotutor/eval/metrics.hpp"
#include "emotutor/eval/verdict.hpp"
#include "emotutor/face.hpp"
#include "emotutor/json_io.hpp"
#include "emotutor/server.hpp"
#include "emotutor/service_config.hpp"
#include "emotutor/session.hpp"
#include "emotutor/strategy.hpp"
#include "emotutor/text_emotion.hpp"
#include "emotutor/tutor_backend.hpp"
