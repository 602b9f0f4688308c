"""Structured errors for the relation engine"""
from enum import Enum
from typing import Any, Dict, Optional


class ErrorType(Enum):
    """エラータイプの定義"""
    VALIDATION_ERROR = "validation_error"
    SYNTAX_ERROR = "syntax_error"
    CONSISTENCY_ERROR = "consistency_error"
    NOT_FOUND_ERROR = "not_found_error"
    CONFIGURATION_ERROR = "configuration_error"


class ErrorCode(Enum):
    """エラーコードの定義"""
    # 入力エラー (1000番台)
    INVALID_TYPE = 1001
    INVALID_FORMULA = 1002
    INVALID_OPTION = 1003
    UNCLASSIFIED_TYPE = 1004
    NON_TERMINATING_SERIES = 1005

    # データエラー (2000番台)
    FIXTURE_NOT_FOUND = 2001
    FIXTURE_COUNT_MISMATCH = 2002
    JTABLE_INVALID = 2003

    # 整合性エラー (3000番台)
    NON_DIAGONAL_PIVOT = 3001
    NO_SHIFT_STABILITY = 3002
    COLLAPSE_MISMATCH = 3003
    BAD_DENOMINATOR = 3004


class CausticError(Exception):
    """エンジン共通の例外"""

    error_type = ErrorType.VALIDATION_ERROR
    code = ErrorCode.INVALID_OPTION

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None,
                 code: Optional[ErrorCode] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        if code is not None:
            self.code = code

    def to_dict(self) -> Dict[str, Any]:
        """構造化エラーレスポンスを作成"""
        error = {
            "type": self.error_type.value,
            "code": self.code.value,
            "message": self.message,
        }
        if self.details:
            error["details"] = self.details
        return {"error": error}


class TypeGrammarError(CausticError):
    """型の文法エラー"""
    error_type = ErrorType.SYNTAX_ERROR
    code = ErrorCode.INVALID_TYPE

    def __init__(self, message: str, text: str = "", column: int = 0):
        super().__init__(message, {"text": text, "column": column})
        self.text = text
        self.column = column


class FormulaSyntaxError(CausticError):
    """式DSLの構文エラー（行・列つき）"""
    error_type = ErrorType.SYNTAX_ERROR
    code = ErrorCode.INVALID_FORMULA

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = ""):
        location = f"{source}:" if source else ""
        super().__init__(f"{location}{line}:{column}: {message}",
                         {"line": line, "column": column, "source": source})
        self.line = line
        self.column = column


class TruncationError(CausticError):
    code = ErrorCode.NON_TERMINATING_SERIES


class UnclassifiedTypeError(CausticError):
    code = ErrorCode.UNCLASSIFIED_TYPE


class JTableError(CausticError):
    error_type = ErrorType.CONSISTENCY_ERROR
    code = ErrorCode.JTABLE_INVALID


class SolveError(CausticError):
    error_type = ErrorType.CONSISTENCY_ERROR
    code = ErrorCode.NON_DIAGONAL_PIVOT


class LiftError(CausticError):
    error_type = ErrorType.CONSISTENCY_ERROR
    code = ErrorCode.NO_SHIFT_STABILITY


class CollapseError(CausticError):
    error_type = ErrorType.CONSISTENCY_ERROR
    code = ErrorCode.COLLAPSE_MISMATCH


class CongruenceError(CausticError):
    error_type = ErrorType.CONSISTENCY_ERROR
    code = ErrorCode.BAD_DENOMINATOR


class FixtureError(CausticError):
    error_type = ErrorType.NOT_FOUND_ERROR
    code = ErrorCode.FIXTURE_NOT_FOUND
