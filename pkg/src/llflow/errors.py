"""Exception taxonomy for the llflow engine.

Every error that can cross a module boundary gets its own class so the
service layer can map failures to stable machine-readable codes.
"""


class LLFlowError(Exception):
    """Base class for all engine errors."""

    code = "error"


# --- formula / spec level -------------------------------------------------

class ParseError(LLFlowError):
    code = "parse_error"

    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position


class MixedPolarity(LLFlowError):
    """A formula mixes input- and output-polarity connectives."""

    code = "mixed_polarity"


class NoOutput(LLFlowError):
    """A sequent with no positive member cannot be a process specification."""

    code = "no_output"


class MultipleOutputs(LLFlowError):
    """A sequent with two or more positive members is not a valid process."""

    code = "multiple_outputs"


# --- kernel ---------------------------------------------------------------

class KernelError(LLFlowError):
    code = "kernel_error"


class SchemaMismatch(KernelError):
    """Premises do not fit the schema of the rule being applied."""

    code = "schema_mismatch"


class ContextMismatch(KernelError):
    """The two premises of an additive rule carry different contexts."""

    code = "context_mismatch"


class AmbiguousSelection(KernelError):
    """A principal formula occurs more than once and no index was given."""

    code = "ambiguous_selection"


# --- provers ----------------------------------------------------------------

class EmptyList(LLFlowError):
    code = "empty_list"


class SizeCapExceeded(LLFlowError):
    code = "size_cap_exceeded"


# --- composition actions ----------------------------------------------------

class ActionError(LLFlowError):
    code = "action_error"


class SelectionNotFound(ActionError):
    code = "selection_not_found"


class SelectionNotInput(ActionError):
    code = "selection_not_input"


class NoMatchingInput(ActionError):
    """No input of the receiving process matches the produced output."""

    code = "no_matching_input"


class PriorityUnmatchable(ActionError):
    """The user-selected output subterm could not be matched to any input."""

    code = "priority_unmatchable"


class DuplicateComponent(ActionError):
    """Both operands contain a component process with the same name."""

    code = "duplicate_component"


# --- workflow graph ---------------------------------------------------------

class UnresolvedChoice(LLFlowError):
    """A simulation reached an optional output with no branch resolution."""

    code = "unresolved_choice"


# --- workspace / service ------------------------------------------------------

class UnknownProcess(LLFlowError):
    code = "unknown_process"


class DuplicateName(LLFlowError):
    code = "duplicate_name"


class VersionMismatch(LLFlowError):
    code = "version_mismatch"
