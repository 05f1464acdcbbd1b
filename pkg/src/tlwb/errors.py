"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class BudgetExceeded(WorkbenchError):
    """An exhaustive enumeration would exceed its configured budget."""


# --- syntax / construction ---

class ParseError(WorkbenchError):
    """Concrete-syntax error; carries the byte span of the offending text."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span


class ArityError(WorkbenchError):
    """A symbol is used with the wrong number of arguments."""


class DuplicateQuantifiedVariable(WorkbenchError):
    """The same variable is quantified twice in one prefix."""


class InvalidInstance(WorkbenchError):
    """An ADQBF instance violates its structural invariants."""


# --- evaluation ---

class UnboundSymbol(WorkbenchError):
    """A free symbol has no binding in the interpretation."""


class ArityMismatch(WorkbenchError):
    """A bound table's arity disagrees with its symbol."""


class NotASentence(WorkbenchError):
    """The operation requires a formula without free variables."""


class NotExistential(WorkbenchError):
    """A DQBF operation was given an instance with a union block."""


class IncompleteChoice(WorkbenchError):
    """A supplementing function is not total or maps a row to the empty set."""


class FreeVarOutsideDomain(WorkbenchError):
    """A free variable of the formula is missing from the team domain."""


class UnknownGda(WorkbenchError):
    """A generalized atom name does not resolve in the registry."""


class UnknownWorld(WorkbenchError):
    """A modal team mentions a world outside the model."""


class NotFlatFragment(WorkbenchError):
    """The formula is outside the strong-negation- and atom-free fragment."""


class DefinitionMismatch(WorkbenchError):
    """A generalized atom's extension and definition disagree on a team."""


class UnknownFamily(WorkbenchError):
    """Unknown built-in generalized-atom family name."""


# --- translation passes ---

class ShapeMismatch(WorkbenchError):
    """The input formula does not have the shape the pass requires."""


class SymbolClash(WorkbenchError):
    """A symbol that must be fresh already occurs in the input."""


class NotClosed(WorkbenchError):
    """The pass requires a closed formula."""


class NotNormalized(WorkbenchError):
    """The pass requires simple prenex unique-argument input."""


class LastBlockNotUnion(WorkbenchError):
    """Collapse requires the final quantifier block to be a union block."""


class EmptyUniversalPrefix(WorkbenchError):
    """The pass requires at least one universally quantified variable."""


class EmptyVarList(WorkbenchError):
    """The operation requires a nonempty variable list."""


class NotPrenex(WorkbenchError):
    """The pass requires a prenex formula with a quantifier-free matrix."""


class WrongFragment(WorkbenchError):
    """The formula is outside the fragment the pass accepts."""


class UndefinableGda(WorkbenchError):
    """A generalized atom without a defining formula cannot be compiled."""


class UnexpectedFreeSymbols(WorkbenchError):
    """The formula has free symbols beyond the single expected one."""
