class ConfigError(Exception):
    """Raised when an experiment configuration cannot be loaded or validated."""

    def __init__(self, reason):
        self.message = 'Invalid experiment configuration: {}'.format(reason)
        super().__init__(self.message)


class CommandFailure(Exception):
    """A post-condition check failed while running a command.

    __________
    Properties
    __________
    command : `str`
        The sub-command that failed.
    error : `str`
        The name of the underlying exception.
    witness : `object`
        Machine-readable data locating the failure, when the check provides it.
    """

    def __init__(self, command: str, error: Exception):
        self.command = command
        self.error = error.__class__.__name__
        self.witness = getattr(error, 'witness', None)
        self.message = getattr(error, 'message', str(error))
        super().__init__(self.message)

    def to_primitive(self):
        witness = self.witness
        if witness is not None and not isinstance(witness, (dict, list, str, int, float)):
            witness = repr(witness)
        return {'command': self.command, 'error': self.error, 'message': self.message, 'witness': witness}
