#pragma once

#include <stdexcept>
#include <string>

namespace endocal {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Pose component outside its configured range.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// Field of view outside (0, 180) degrees.
class BadFovError : public Error {
public:
    using Error::Error;
};

/// Gripper angle outside the joint limits of a jointed mesh.
class JointLimitError : public Error {
public:
    using Error::Error;
};

/// Polygon with fewer than 3 vertices.
class DegeneratePolygonError : public Error {
public:
    using Error::Error;
};

/// Two rasters of different sizes where equal sizes are required.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// Ground-truth weight field with zero energy.
class EmptyGroundTruthError : public Error {
public:
    using Error::Error;
};

/// Empty frame set where at least one frame is required.
class NoFramesError : public Error {
public:
    using Error::Error;
};

/// Calibration input without any annotated frame.
class NoAnnotatedFramesError : public Error {
public:
    using Error::Error;
};

/// Nominal transforms so wrong that no frame projects into the view.
class AllProjectionsEmptyError : public Error {
public:
    using Error::Error;
};

/// Text-format parse failure; row and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int row, int col)
        : Error(msg + " (row " + std::to_string(row) + ", col " + std::to_string(col) + ")"),
          row(row), col(col) {}
    int row;
    int col;
};

/// Tracker rotation block too far from orthonormal, or a reflection.
class NonRigidRotationError : public Error {
public:
    NonRigidRotationError(const std::string& msg, int row)
        : Error(msg + " (row " + std::to_string(row) + ")"), row(row) {}
    explicit NonRigidRotationError(const std::string& msg) : Error(msg), row(0) {}
    int row;
};

/// OBJ directive outside the supported subset.
class UnsupportedDirectiveError : public Error {
public:
    using Error::Error;
};

/// Mesh index out of range.
class DanglingIndexError : public Error {
public:
    using Error::Error;
};

/// Sidecar references a part name that was never declared.
class UnknownPartError : public Error {
public:
    using Error::Error;
};

/// JSONL record violates the schema; line is 1-based.
class SchemaError : public Error {
public:
    SchemaError(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    int line;
};

/// Background or normal-map catalog without entries.
class EmptyCatalogError : public Error {
public:
    using Error::Error;
};

/// Metric summary requested over an empty pair list.
class NoPairsError : public Error {
public:
    using Error::Error;
};

}  // namespace endocal
