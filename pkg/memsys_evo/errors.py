class CatalogError(Exception):
    """
    Something is wrong with the design space description: the catalog
    of memory compilers or the system of memories to be built with it.
    """
    pass

class CatalogParseError(CatalogError):
    """
    The catalog or system file could not be read. Is it UTF-8 encoded
    JSON? Does it have the expected top-level keys?
    """
    pass

class ValidationError(CatalogError):
    """
    The catalog or system was parsed, but violates one of its
    invariants. The message names the invariant and where in the file
    it was violated.
    """
    pass

class NoEligibleCompiler(CatalogError):
    """
    No compiler in the catalog can build this memory. Check that some
    compiler has the memory's kind and port count, and that its words
    and bits ranges include the memory's size.
    """
    def __init__(self, memory_id, message=None):
        if message is None:
            message = 'No eligible compiler for memory {!r}'.format(
                    memory_id)
        super().__init__(message)
        self.memory_id = memory_id

class PreconditionViolation(ValueError):
    """
    An operation was called with arguments outside of its domain, for
    example a population that is too small for differential evolution.
    """
    pass

class ArityMismatch(PreconditionViolation):
    """
    Objective vectors or genomes that should have the same length do
    not.
    """
    pass

class EmptyInput(PreconditionViolation):
    """
    An operation that needs at least one item was given none.
    """
    pass

class InfeasibleParameterization(Exception):
    """
    The parameter codes given are not a feasible parameterization of
    this compiler for this memory. Genomes must be repaired before they
    are evaluated.
    """
    pass

class EstimatorError(Exception):
    """
    The PPA estimator backend failed to produce objective values.
    """
    pass

class BackendExited(EstimatorError):
    """
    The external estimator process exited, or closed its output, while
    a batch was outstanding.
    """
    pass

class ProtocolError(EstimatorError):
    """
    The external estimator sent a response that is not valid for the
    line protocol: not JSON, missing keys, or for the wrong batch.
    """
    pass

class ArityMismatchResponse(ProtocolError):
    """
    The estimator returned a different number of objective vectors
    than there were items in the batch, or vectors of the wrong length.
    """
    def __init__(self, batch_id, message):
        super().__init__('Batch {}: {}'.format(batch_id, message))
        self.batch_id = batch_id

class EstimatorTimeout(EstimatorError):
    """
    The external estimator did not answer a batch in time.
    """
    pass

class CommunicationError(EstimatorError):
    """
    There was an error communicating with the remote estimation
    service. Is it running? Is the URL correct?
    """
    pass

class CapacityExceeded(Exception):
    """
    The exhaustive search would have to look at more candidates or
    combinations than allowed. Raise the cap, or use the evolutionary
    optimizer instead.
    """
    def __init__(self, count, cap, what='combinations'):
        super().__init__(
                'Exhaustive search needs {} {}, more than the cap of {}'
                .format(count, what, cap))
        self.count = count
        self.cap = cap
