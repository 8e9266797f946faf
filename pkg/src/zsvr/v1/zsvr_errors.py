class ZsvrError(Exception):
    """Root of the restoration toolkit's errors.

    ``problem_data`` holds the offending values (shapes, keys, collected
    problems) so callers can inspect them without parsing the message.
    """

    def __init__(self, message: str, error_code: str = None, problem_data: dict = None):
        super().__init__(message)
        self.error_code = error_code
        self.problem_data = problem_data

    def __str__(self):
        parts = [super().__str__()]
        if self.error_code is not None:
            parts.append(f"(Error Code: {self.error_code})")
        if self.problem_data is not None:
            parts.append(f"(Problem Data: {self.problem_data})")
        return " ".join(parts)


class ZsvrFormatError(ZsvrError):
    # bad magic tag or header in a PNM, .flo or RTF1 file
    pass


class ZsvrLengthError(ZsvrError):
    # truncated payload, or a sequence too short to measure
    pass


class ZsvrShapeError(ZsvrError):
    pass


class ZsvrParameterError(ZsvrError):
    pass


class ZsvrConfigurationError(ZsvrError):
    # raised before any denoising step runs
    pass


class ZsvrSerializationError(ZsvrError):
    pass


class ZsvrIndexError(ZsvrError):
    pass


class ZsvrEmptyInputError(ZsvrError):
    pass


class ZsvrNothingToMergeError(ZsvrShapeError):
    pass
